#ifndef ISOCALC_SPECTRAL_HPP
#define ISOCALC_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>

#include "isocalc/catalog.hpp"
#include "isocalc/hermitian.hpp"
#include "isocalc/vector_field.hpp"

namespace isocalc {

/// Tolerance overrides shared by the calculus operations. Unset values fall
/// back to the defaults documented next to each helper.
template <typename Real>
struct CalculusOptions {
  std::optional<Real> block_tol;      ///< default_block_tol(A)
  std::optional<Real> structure_tol;  ///< default_structure_tol(J)
  std::optional<Real> value_tol;      ///< 1e-8 max(1, max|F(alpha)|)
  Real fd_step = 0;                   ///< <= 0: default_fd_step
};

/// Quotients above this magnitude are flagged as ill-conditioned.
inline constexpr double kQuotientWarning = 1e6;

namespace detail {

template <typename Real>
RealVector<Real> eval_at_spectrum(const VectorField<Real>& f, const RealVector<Real>& alpha) {
  RealVector<Real> v = checked_eval(f, alpha);
  if (!v.allFinite()) throw NumericalError("field '" + f.meta.name + "' is not finite at the spectrum");
  return v;
}

template <typename Real>
Real value_tol(const CalculusOptions<Real>& opts, const RealVector<Real>& v) {
  if (opts.value_tol) return *opts.value_tol;
  return Real(1e-8) * std::max<Real>(1, v.size() ? v.cwiseAbs().maxCoeff() : Real(0));
}

/// Throws WellDefinednessError unless F is constant on every block.
template <typename Real>
void require_block_constant(const VectorField<Real>& f, const RealVector<Real>& v, const BlockStructure<Real>& blocks,
                            Real tol) {
  for (Index b = 0; b < blocks.count(); ++b) {
    const auto& blk = blocks.blocks[b];
    if (blk.size < 2) continue;
    const auto seg = v.segment(blk.begin, blk.size);
    const Real spread = seg.maxCoeff() - seg.minCoeff();
    if (spread > tol) {
      std::ostringstream os;
      os << "field '" << f.meta.name << "' is not block-constant at a repeated eigenvalue: block " << b + 1
         << " (indices " << blk.begin + 1 << ".." << blk.end() << ") has F-values spread " << spread << " > " << tol
         << "; L_F(A) would depend on the eigenbasis";
      throw WellDefinednessError(os.str());
    }
  }
}

template <typename Real>
RealVector<Real> block_means(const RealVector<Real>& v, const BlockStructure<Real>& blocks) {
  RealVector<Real> out = v;
  for (const auto& b : blocks.blocks) out.segment(b.begin, b.size).setConstant(v.segment(b.begin, b.size).mean());
  return out;
}

template <typename Real>
ComplexMatrix<Real> synthesize(const ComplexMatrix<Real>& u, const RealVector<Real>& diag) {
  return u * diag.template cast<std::complex<Real>>().asDiagonal() * u.adjoint();
}

}  // namespace detail

template <typename Real>
struct ApplyResult {
  HermitianMatrix<Real> result;
  SpectralDecomposition<Real> decomposition;
  BlockStructure<Real> blocks;
  /// F(alpha) with each block replaced by its mean.
  RealVector<Real> values;
};

/// L_F(A) = U diag(F(alpha)) U*, together with the decomposition it used.
template <typename Real>
ApplyResult<Real> apply_detailed(const VectorField<Real>& f, const HermitianMatrix<Real>& a,
                                 const CalculusOptions<Real>& opts = {}) {
  f.require_dim(a.dim());
  ApplyResult<Real> out;
  out.decomposition = eig_sorted(a);
  const auto& dec = out.decomposition;
  out.blocks = block_partition(dec.alpha, opts.block_tol.value_or(default_block_tol(dec)));
  const RealVector<Real> v = detail::eval_at_spectrum(f, dec.alpha);
  detail::require_block_constant(f, v, out.blocks, detail::value_tol(opts, v));
  out.values = detail::block_means(v, out.blocks);
  out.result = HermitianMatrix<Real>::symmetrized(detail::synthesize(dec.U, out.values));
  return out;
}

template <typename Real>
HermitianMatrix<Real> apply(const VectorField<Real>& f, const HermitianMatrix<Real>& a,
                            const CalculusOptions<Real>& opts = {}) {
  return apply_detailed(f, a, opts).result;
}

/// The matrix [F, alpha] of first divided differences:
///   (s_i - s_j) / (a_i - a_j)  between different blocks i != j,
///   r_i                        off the diagonal inside block i,
///   r_i + t_ii                 on the diagonal.
template <typename Real>
struct DividedDifferenceMatrix {
  RealMatrix<Real> entries;
  RealVector<Real> alpha;
  BlockStructure<Real> blocks;
  JacobianStructure<Real> structure;
  Real max_quotient = 0;
  bool ill_conditioned = false;
};

/// Assembles [F, alpha] from a fitted Jacobian structure.
template <typename Real>
DividedDifferenceMatrix<Real> divided_difference(const JacobianStructure<Real>& st, const RealVector<Real>& alpha) {
  const auto& blocks = st.blocks;
  const Index d = blocks.dim();
  DividedDifferenceMatrix<Real> dd;
  dd.alpha = alpha;
  dd.blocks = blocks;
  dd.structure = st;
  dd.entries.resize(d, d);
  const auto of = blocks.membership();
  for (Index m = 0; m < d; ++m)
    for (Index n = 0; n < d; ++n) {
      const Index bm = of[static_cast<std::size_t>(m)], bn = of[static_cast<std::size_t>(n)];
      if (bm != bn) {
        const Real q = (st.s(bm) - st.s(bn)) / (blocks.distinct_values(bm) - blocks.distinct_values(bn));
        dd.entries(m, n) = q;
        dd.max_quotient = std::max(dd.max_quotient, std::abs(q));
      } else {
        dd.entries(m, n) = m == n ? st.r(bm) + st.t(bm, bm) : st.r(bm);
      }
    }
  dd.ill_conditioned = dd.max_quotient > Real(kQuotientWarning);
  return dd;
}

/// [F, alpha] at a non-increasing alpha, given the Jacobian of F^ext there.
/// The Jacobian must have the symmetric block form within structure_tol.
template <typename Real>
DividedDifferenceMatrix<Real> divided_difference(const VectorField<Real>& f, const RealVector<Real>& alpha,
                                                 const BlockStructure<Real>& blocks, const RealMatrix<Real>& jac,
                                                 std::optional<Real> structure_tol = std::nullopt,
                                                 std::optional<Real> value_tol = std::nullopt) {
  const RealVector<Real> v = detail::eval_at_spectrum(f, alpha);
  CalculusOptions<Real> o;
  o.value_tol = value_tol;
  detail::require_block_constant(f, v, blocks, detail::value_tol(o, v));
  const auto st = extract_structure(jac, blocks, v, structure_tol.value_or(default_structure_tol(jac)));
  return divided_difference(st, alpha);
}

/// Convenience overload computing blocks and Jacobian itself.
template <typename Real>
DividedDifferenceMatrix<Real> divided_difference(const VectorField<Real>& f, const RealVector<Real>& alpha,
                                                 const CalculusOptions<Real>& opts = {}) {
  const Real tol = opts.block_tol.value_or(
      std::max(Real(1e-8), Real(1e-12) * (alpha.size() ? alpha.cwiseAbs().maxCoeff() : Real(0))));
  const auto blocks = block_partition(alpha, tol);
  const RealMatrix<Real> jac = jacobian(f, alpha, opts.fd_step);
  return divided_difference(f, alpha, blocks, jac, opts.structure_tol, opts.value_tol);
}

template <typename Real>
struct FrechetDerivativeReport {
  HermitianMatrix<Real> result;  ///< L_F'(E)
  HermitianMatrix<Real> Ehat;    ///< U* E U
  RealVector<Real> ehat;         ///< diagonal of Ehat
  DividedDifferenceMatrix<Real> dd;
  RealMatrix<Real> jac;          ///< Jacobian of F^ext at alpha as computed
  SpectralDecomposition<Real> decomposition;
  Real structure_residual = 0;
  /// Max-norm asymmetry of U(...)U* before symmetrization.
  Real asymmetry = 0;
};

/// Frechet derivative of A -> L_F(A) in direction E:
///   L_F'(E) = U ([F, alpha] o Ehat + diag(J° ehat)) U*
/// where J° is the structured Jacobian of F^ext at alpha with zeroed diagonal.
template <typename Real>
FrechetDerivativeReport<Real> frechet_apply(const VectorField<Real>& f, const HermitianMatrix<Real>& a,
                                            const HermitianMatrix<Real>& e, const CalculusOptions<Real>& opts = {}) {
  if (a.dim() != e.dim()) throw DimensionMismatch("frechet_apply: A and E differ in dimension");
  f.require_dim(a.dim());
  FrechetDerivativeReport<Real> rep;
  rep.decomposition = eig_sorted(a);
  const auto& dec = rep.decomposition;
  const auto blocks = block_partition(dec.alpha, opts.block_tol.value_or(default_block_tol(dec)));
  const RealVector<Real> v = detail::eval_at_spectrum(f, dec.alpha);
  detail::require_block_constant(f, v, blocks, detail::value_tol(opts, v));

  rep.jac = jacobian(f, dec.alpha, opts.fd_step);
  const auto st = extract_structure(rep.jac, blocks, v, opts.structure_tol.value_or(default_structure_tol(rep.jac)));
  rep.structure_residual = st.residual;
  rep.dd = divided_difference(st, dec.alpha);

  rep.Ehat = conjugate_by(dec.U, e);
  rep.ehat = rep.Ehat.matrix().diagonal().real();
  RealMatrix<Real> j_off = st.expanded();
  j_off.diagonal().setZero();

  ComplexMatrix<Real> inner = rep.dd.entries.template cast<std::complex<Real>>().cwiseProduct(rep.Ehat.matrix());
  inner.diagonal() += (j_off * rep.ehat).template cast<std::complex<Real>>();
  const ComplexMatrix<Real> raw = dec.U * inner * dec.U.adjoint();
  rep.asymmetry = hermitian_asymmetry(raw);
  rep.result = HermitianMatrix<Real>::symmetrized(raw);
  return rep;
}

/// Daleckii-Krein derivative of the scalar functional calculus,
/// U ([f, alpha] o Ehat) U*, computed directly from f and f'.
template <typename Real>
HermitianMatrix<Real> scalar_frechet(const ScalarFunction<Real>& s, const HermitianMatrix<Real>& a,
                                     const HermitianMatrix<Real>& e, std::optional<Real> block_tol = std::nullopt) {
  if (a.dim() != e.dim()) throw DimensionMismatch("scalar_frechet: A and E differ in dimension");
  if (!s.df) throw InvalidInput("scalar_frechet: '" + s.name + "' has no derivative");
  const auto dec = eig_sorted(a);
  const auto blocks = block_partition(dec.alpha, block_tol.value_or(default_block_tol(dec)));
  const auto of = blocks.membership();
  const Index d = a.dim();
  RealVector<Real> fa(d);
  for (Index m = 0; m < d; ++m) fa(m) = s.f(dec.alpha(m));
  if (!fa.allFinite()) throw NumericalError("'" + s.name + "' is not evaluable at an eigenvalue");
  RealMatrix<Real> loewner(d, d);
  for (Index m = 0; m < d; ++m)
    for (Index n = 0; n < d; ++n) {
      if (of[static_cast<std::size_t>(m)] != of[static_cast<std::size_t>(n)])
        loewner(m, n) = (fa(m) - fa(n)) / (dec.alpha(m) - dec.alpha(n));
      else
        loewner(m, n) = s.df((dec.alpha(m) + dec.alpha(n)) / 2);
    }
  if (!loewner.allFinite()) throw NumericalError("'" + s.name + "' derivative is not evaluable at an eigenvalue");
  const ComplexMatrix<Real> ehat = dec.U.adjoint() * e.matrix() * dec.U;
  const ComplexMatrix<Real> inner = loewner.template cast<std::complex<Real>>().cwiseProduct(ehat);
  return HermitianMatrix<Real>::symmetrized(dec.U * inner * dec.U.adjoint());
}

/// Exact L_F(diag(alpha) + h (tau E_mn + conj(tau) E_nm)), using the closed-form
/// eigendecomposition of the 2x2 block on rows/columns m, n. All other
/// eigenpairs are untouched by the perturbation.
template <typename Real>
HermitianMatrix<Real> offdiag_exact_value(const VectorField<Real>& f, const RealVector<Real>& alpha, Index m,
                                          Index n, std::complex<Real> tau, Real h) {
  using C = std::complex<Real>;
  const Index d = alpha.size();
  if (m == n || m < 0 || n < 0 || m >= d || n >= d) throw InvalidInput("offdiag_exact_value: need distinct m, n");
  if (std::abs(std::abs(tau) - Real(1)) > Real(1e-12)) throw InvalidInput("offdiag_exact_value: tau must be unimodular");

  ComplexMatrix<Real> u = ComplexMatrix<Real>::Identity(d, d);
  RealVector<Real> xi = alpha;
  const Real a1 = alpha(m), a2 = alpha(n);
  if (h != 0) {
    Real lam_plus, lam_minus;
    C v_plus[2], v_minus[2];
    if (a1 == a2) {
      // Exact factorization: eigenvalues a +- h, eigenvectors (1, conj tau)/sqrt2
      // and (tau, -1)/sqrt2.
      const Real s = 1 / std::sqrt(Real(2));
      lam_plus = a1 + h;
      lam_minus = a1 - h;
      v_plus[0] = C(s);
      v_plus[1] = std::conj(tau) * s;
      v_minus[0] = tau * s;
      v_minus[1] = C(-s);
    } else {
      const Real delta = (a1 - a2) / 2;
      const Real rho = std::hypot(delta, h);
      const Real mid = (a1 + a2) / 2;
      lam_plus = mid + rho;
      lam_minus = mid - rho;
      if (delta >= 0) {
        v_plus[0] = C(rho + delta);
        v_plus[1] = std::conj(tau) * h;
        v_minus[0] = -tau * h;
        v_minus[1] = C(rho + delta);
      } else {
        v_plus[0] = tau * h;
        v_plus[1] = C(rho - delta);
        v_minus[0] = C(-(rho - delta));
        v_minus[1] = std::conj(tau) * h;
      }
      auto normalize = [](C* v) {
        const Real nrm = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
        v[0] /= nrm;
        v[1] /= nrm;
      };
      normalize(v_plus);
      normalize(v_minus);
    }
    u(m, m) = v_plus[0];
    u(n, m) = v_plus[1];
    u(m, n) = v_minus[0];
    u(n, n) = v_minus[1];
    xi(m) = lam_plus;
    xi(n) = lam_minus;
  }
  const RealVector<Real> fx = extend_eval(f, xi);
  return HermitianMatrix<Real>::symmetrized(detail::synthesize(u, fx));
}

/// Exact L_F of [[a1, tau h], [conj(tau) h, a2]] for a two-dimensional field.
template <typename Real>
HermitianMatrix<Real> gateaux_offdiag_2x2(const VectorField<Real>& f, Real a1, Real a2, std::complex<Real> tau,
                                          Real h) {
  return offdiag_exact_value(f, RealVector<Real>{{a1, a2}}, 0, 1, tau, h);
}

}  // namespace isocalc

#endif  // ISOCALC_SPECTRAL_HPP
