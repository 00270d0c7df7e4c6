#ifndef ISOCALC_VECTOR_FIELD_HPP
#define ISOCALC_VECTOR_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isocalc/hermitian.hpp"

namespace isocalc {

/// Declared regularity of a vector field. These are claims made by whoever
/// constructs the field; the numerical checks below test them.
template <typename Real>
struct FieldMeta {
  std::string name;
  bool claims_block_constant = true;
  bool claims_c1_point_symmetric = false;
  /// F^ext is C^2, so first-order remainders decay quadratically.
  bool claims_c2 = false;
  std::optional<Real> lipschitz_constant;
};

/// A map F from non-increasing d-tuples to R^d.
///
/// `eval` is only ever called on non-increasing input. `analytic_jacobian`,
/// when present, returns the Jacobian of the extension F^ext at an arbitrary
/// point, entry (m, n) = dF^ext_m / dx_n. `dim == 0` means F is defined for
/// every dimension.
template <typename Real>
struct VectorField {
  using Vector = RealVector<Real>;
  using Matrix = RealMatrix<Real>;

  Index dim = 0;
  std::function<Vector(const Vector&)> eval;
  std::function<Matrix(const Vector&)> analytic_jacobian;
  FieldMeta<Real> meta;

  bool supports(Index d) const { return dim == 0 || dim == d; }

  void require_dim(Index d) const {
    if (!supports(d)) {
      std::ostringstream os;
      os << "field '" << meta.name << "' is defined for d=" << dim << ", got d=" << d;
      throw DimensionMismatch(os.str());
    }
  }
};

/// Stable permutation sorting x non-increasingly: x[order[k]] is the k-th
/// largest entry, ties kept in index order.
template <typename Real>
std::vector<Index> descending_order(const RealVector<Real>& x) {
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x(a) > x(b); });
  return order;
}

template <typename Real>
bool has_ties(const RealVector<Real>& x) {
  std::vector<Real> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

template <typename Real>
RealVector<Real> checked_eval(const VectorField<Real>& f, const RealVector<Real>& sorted) {
  f.require_dim(sorted.size());
  RealVector<Real> y = f.eval(sorted);
  if (y.size() != sorted.size()) throw DimensionMismatch("field '" + f.meta.name + "' returned wrong length");
  return y;
}

/// Evaluates F^ext(x) = S* F(S x), S the stable descending sort of x.
///
/// When x has repeated entries the result is only independent of the choice of
/// S if F is block-constant, so fields that do not claim it are rejected there.
template <typename Real>
RealVector<Real> extend_eval(const VectorField<Real>& f, const RealVector<Real>& x) {
  if (!f.meta.claims_block_constant && has_ties(x))
    throw InvalidInput("field '" + f.meta.name +
                       "' is not block-constant; its extension is ambiguous at points with repeated coordinates");
  const auto order = descending_order(x);
  RealVector<Real> sorted(x.size());
  for (Index k = 0; k < x.size(); ++k) sorted(k) = x(order[static_cast<std::size_t>(k)]);
  const RealVector<Real> y = checked_eval(f, sorted);
  RealVector<Real> out(x.size());
  for (Index k = 0; k < x.size(); ++k) out(order[static_cast<std::size_t>(k)]) = y(k);
  return out;
}

/// cbrt(eps) * max(1, ||x||_inf)
template <typename Real>
Real default_fd_step(const RealVector<Real>& x) {
  const Real scale = x.size() == 0 ? Real(1) : std::max<Real>(1, x.cwiseAbs().maxCoeff());
  return std::cbrt(std::numeric_limits<Real>::epsilon()) * scale;
}

/// Central finite-difference Jacobian of F^ext. `step <= 0` selects the default.
template <typename Real>
RealMatrix<Real> jacobian_fd(const VectorField<Real>& f, const RealVector<Real>& x, Real step = Real(0)) {
  const Real h = step > 0 ? step : default_fd_step(x);
  const Index d = x.size();
  RealMatrix<Real> j(d, d);
  for (Index n = 0; n < d; ++n) {
    RealVector<Real> xp = x, xm = x;
    xp(n) += h;
    xm(n) -= h;
    const RealVector<Real> fp = extend_eval(f, xp);
    const RealVector<Real> fm = extend_eval(f, xm);
    if (!fp.allFinite() || !fm.allFinite()) {
      std::ostringstream os;
      os << "field '" << f.meta.name << "' is not finite near x when perturbing coordinate " << n;
      throw NumericalError(os.str());
    }
    j.col(n) = (fp - fm) / (2 * h);
  }
  return j;
}

/// Jacobian of F^ext at x: the analytic one when the field provides it.
template <typename Real>
RealMatrix<Real> jacobian(const VectorField<Real>& f, const RealVector<Real>& x, Real step = Real(0)) {
  if (f.analytic_jacobian) {
    f.require_dim(x.size());
    RealMatrix<Real> j = f.analytic_jacobian(x);
    if (j.rows() != x.size() || j.cols() != x.size())
      throw DimensionMismatch("analytic Jacobian of '" + f.meta.name + "' has wrong shape");
    if (!j.allFinite()) throw NumericalError("analytic Jacobian of '" + f.meta.name + "' is not finite");
    return j;
  }
  return jacobian_fd(f, x, step);
}

/// True iff F takes equal values (within tol) on each block of equal
/// coordinates of the non-increasing vector x.
template <typename Real>
bool check_block_constant(const RealVector<Real>& fvals, const BlockStructure<Real>& blocks, Real tol) {
  for (const auto& b : blocks.blocks) {
    if (b.size < 2) continue;
    const auto seg = fvals.segment(b.begin, b.size);
    if (seg.maxCoeff() - seg.minCoeff() > tol) return false;
  }
  return true;
}

template <typename Real>
bool check_block_constant(const VectorField<Real>& f, const RealVector<Real>& x, Real tol) {
  return check_block_constant(checked_eval(f, x), block_partition(x, Real(0)), tol);
}

/// Jacobian of F^ext at alpha written in the symmetric block form forced by
/// permutation invariance: on the subblock (i, j) it equals
/// r_i I [i == j] + t_ij 1.
template <typename Real>
struct JacobianStructure {
  BlockStructure<Real> blocks;
  RealVector<Real> s;  ///< common F-value per block
  RealVector<Real> r;
  RealMatrix<Real> t;
  Real residual = 0;
  Index worst_row_block = 0;
  Index worst_col_block = 0;

  /// r_i I + t_ij 1 expanded to a full d x d matrix.
  RealMatrix<Real> expanded() const {
    const Index d = blocks.dim();
    const auto of = blocks.membership();
    RealMatrix<Real> j(d, d);
    for (Index m = 0; m < d; ++m)
      for (Index n = 0; n < d; ++n) {
        const Index bm = of[static_cast<std::size_t>(m)], bn = of[static_cast<std::size_t>(n)];
        j(m, n) = t(bm, bn) + (m == n ? r(bm) : Real(0));
      }
    return j;
  }
};

/// Least-squares fit of the (r, t) block form to J; never throws on a bad fit.
template <typename Real>
JacobianStructure<Real> fit_structure(const RealMatrix<Real>& j, const BlockStructure<Real>& blocks,
                                      const RealVector<Real>& fvals) {
  const Index d = blocks.dim();
  if (j.rows() != d || j.cols() != d || fvals.size() != d)
    throw DimensionMismatch("fit_structure: Jacobian, values and blocks disagree in dimension");
  if (!j.allFinite()) throw NumericalError("fit_structure: Jacobian is not finite");
  const Index k = blocks.count();
  JacobianStructure<Real> out;
  out.blocks = blocks;
  out.s.resize(k);
  out.r.setZero(k);
  out.t.setZero(k, k);
  for (Index a = 0; a < k; ++a) {
    const auto& ba = blocks.blocks[a];
    out.s(a) = fvals.segment(ba.begin, ba.size).mean();
    for (Index b = 0; b < k; ++b) {
      const auto& bb = blocks.blocks[b];
      const auto sub = j.block(ba.begin, bb.begin, ba.size, bb.size);
      if (a != b) {
        out.t(a, b) = sub.mean();
      } else if (ba.size == 1) {
        out.r(a) = sub(0, 0);
      } else {
        const Real n = Real(ba.size);
        const Real diag_mean = sub.diagonal().mean();
        const Real off_mean = (sub.sum() - sub.diagonal().sum()) / (n * n - n);
        out.r(a) = diag_mean - off_mean;
        out.t(a, a) = off_mean;
      }
    }
  }
  const RealMatrix<Real> dev = (j - out.expanded()).cwiseAbs();
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) {
      const auto& ba = blocks.blocks[a];
      const auto& bb = blocks.blocks[b];
      const Real worst = dev.block(ba.begin, bb.begin, ba.size, bb.size).maxCoeff();
      if (worst > out.residual) {
        out.residual = worst;
        out.worst_row_block = a;
        out.worst_col_block = b;
      }
    }
  return out;
}

/// fit_structure, failing when the block form is violated by more than tol.
template <typename Real>
JacobianStructure<Real> extract_structure(const RealMatrix<Real>& j, const BlockStructure<Real>& blocks,
                                          const RealVector<Real>& fvals, Real tol) {
  auto fit = fit_structure(j, blocks, fvals);
  if (fit.residual > tol) {
    std::ostringstream os;
    os << "Jacobian violates the permutation-symmetric block form: residual " << fit.residual << " > " << tol
       << " in subblock (" << fit.worst_row_block + 1 << ", " << fit.worst_col_block + 1 << ")";
    throw StructureViolation(os.str(), static_cast<int>(fit.worst_row_block), static_cast<int>(fit.worst_col_block),
                             static_cast<double>(fit.residual));
  }
  return fit;
}

/// Default structure tolerance: 1e-6 relative to the Jacobian scale.
template <typename Real>
Real default_structure_tol(const RealMatrix<Real>& j) {
  const Real scale = j.size() == 0 ? Real(1) : std::max<Real>(1, j.cwiseAbs().maxCoeff());
  return Real(1e-6) * scale;
}

}  // namespace isocalc

#endif  // ISOCALC_VECTOR_FIELD_HPP
