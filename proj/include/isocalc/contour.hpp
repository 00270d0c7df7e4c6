#ifndef ISOCALC_CONTOUR_HPP
#define ISOCALC_CONTOUR_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>

#include "isocalc/hermitian.hpp"

namespace isocalc {

template <typename Real>
struct ContourOptions {
  int nodes = 64;
  Real gap_min = Real(1e-6);
  std::optional<Real> block_tol;
  /// Quadrature aborts when ||(zI - B)^{-1}||_F exceeds this on a node.
  Real resolvent_limit = Real(1e10);
};

namespace detail {

/// (zI - B)^{-1} by LU, with a guard against nodes sitting on the spectrum.
template <typename Real>
ComplexMatrix<Real> resolvent(const ComplexMatrix<Real>& b, std::complex<Real> z, Real limit) {
  const Index d = b.rows();
  ComplexMatrix<Real> shifted = -b;
  shifted.diagonal().array() += z;
  ComplexMatrix<Real> r = shifted.partialPivLu().solve(ComplexMatrix<Real>::Identity(d, d));
  const Real nrm = r.norm();
  if (!std::isfinite(nrm) || nrm > limit) {
    std::ostringstream os;
    os << "contour node z = " << z << " is too close to an eigenvalue (resolvent norm " << nrm << ")";
    throw ContourError(os.str());
  }
  return r;
}

template <typename Real>
std::complex<Real> circle_node(Real center, Real radius, int j, int n) {
  const Real theta = 2 * std::numbers::pi_v<Real> * Real(j) / Real(n);
  return std::complex<Real>(center, 0) + radius * std::polar(Real(1), theta);
}

}  // namespace detail

template <typename Real>
struct ProjectorResult {
  HermitianMatrix<Real> projector;
  Real center = 0;
  Real radius = 0;
  int nodes = 0;
  /// Asymmetry of the raw quadrature sum before symmetrization.
  Real asymmetry = 0;
  /// ||P - U_b U_b*||_F against the eigenvectors of the same block.
  Real residual = 0;
  BlockStructure<Real> blocks;
};

/// Spectral projector onto the eigenspace of block `block` (0-based) as the
/// trapezoidal rule for (1/2 pi i) \oint (zI - A)^{-1} dz on a circle around the
/// block's value with radius half the distance to the nearest other block.
///
/// Eigenvalues closer than 1e-3 gap_min are treated as one cluster; a cluster
/// whose distance to the next one is below gap_min cannot be enclosed reliably.
template <typename Real>
ProjectorResult<Real> spectral_projector_contour(const HermitianMatrix<Real>& a, Index block,
                                                 const ContourOptions<Real>& opts = {}) {
  if (opts.nodes < 4) throw InvalidInput("contour quadrature needs at least 4 nodes");
  if (a.dim() == 0) throw InvalidInput("empty matrix");
  const auto dec = eig_sorted(a);
  const Real tol = std::min(opts.block_tol.value_or(default_block_tol(dec)), Real(1e-3) * opts.gap_min);
  ProjectorResult<Real> out;
  out.blocks = block_partition(dec.alpha, tol);
  const auto& blocks = out.blocks;
  if (block < 0 || block >= blocks.count()) {
    std::ostringstream os;
    os << "block " << block + 1 << " does not exist; A has " << blocks.count() << " distinct eigenvalue(s)";
    throw InvalidInput(os.str());
  }
  out.center = blocks.distinct_values(block);
  Real gap = std::numeric_limits<Real>::infinity();
  for (Index b = 0; b < blocks.count(); ++b)
    if (b != block) gap = std::min(gap, std::abs(blocks.distinct_values(b) - out.center));
  if (gap < opts.gap_min) {
    std::ostringstream os;
    os << "eigenvalue gap " << gap << " around block " << block + 1 << " is below gap_min " << opts.gap_min;
    throw ContourError(os.str());
  }
  out.radius = std::isfinite(gap) ? gap / 2 : Real(1);
  out.nodes = opts.nodes;

  const Index d = a.dim();
  ComplexMatrix<Real> sum = ComplexMatrix<Real>::Zero(d, d);
  for (int j = 0; j < opts.nodes; ++j) {
    const auto z = detail::circle_node(out.center, out.radius, j, opts.nodes);
    // dz / (2 pi i) = (z - center) dtheta / (2 pi)
    sum += (z - out.center) * detail::resolvent(a.matrix(), z, opts.resolvent_limit);
  }
  sum /= Real(opts.nodes);
  out.asymmetry = hermitian_asymmetry(sum);
  out.projector = HermitianMatrix<Real>::symmetrized(sum);

  const auto& blk = blocks.blocks[static_cast<std::size_t>(block)];
  const ComplexMatrix<Real> ub = dec.U.middleCols(blk.begin, blk.size);
  out.residual = (out.projector.matrix() - ub * ub.adjoint()).norm();
  return out;
}

template <typename Real>
struct ContourSum {
  Real value = 0;
  /// Imaginary part of the quadrature, zero in exact arithmetic.
  Real imag = 0;
};

/// Sum over the eigenvalues beta of B inside the circle of (beta - center),
/// as (1/2 pi i) \oint (z - center) (det(zI - B))' / det(zI - B) dz. The
/// logarithmic derivative of the determinant is evaluated as
/// trace((zI - B)^{-1}).
template <typename Real>
ContourSum<Real> contour_block_sum(const HermitianMatrix<Real>& b, Real center, Real radius, int nodes = 128,
                                   Real resolvent_limit = Real(1e10)) {
  if (nodes < 4) throw InvalidInput("contour quadrature needs at least 4 nodes");
  if (!(radius > 0)) throw InvalidInput("contour radius must be positive");
  std::complex<Real> acc = 0;
  for (int j = 0; j < nodes; ++j) {
    const auto z = detail::circle_node(center, radius, j, nodes);
    const auto w = z - center;
    acc += w * w * detail::resolvent(b.matrix(), z, resolvent_limit).trace();
  }
  acc /= Real(nodes);
  return {acc.real(), acc.imag()};
}

}  // namespace isocalc

#endif  // ISOCALC_CONTOUR_HPP
