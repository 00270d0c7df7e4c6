#ifndef ISOCALC_TESTS_SUPPORT_HPP
#define ISOCALC_TESTS_SUPPORT_HPP

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "isocalc/catalog.hpp"
#include "isocalc/spectral.hpp"
#include "isocalc/verification.hpp"

namespace isocalc::testing {

/// Every catalog member with its default parameters.
inline std::vector<std::string> all_field_specs() {
  return {"scalar_lift:identity", "scalar_lift:square", "scalar_lift:abs", "scalar_lift:exp",
          "sqrt_shifted:2",       "soft_threshold:1",   "constant:1",      "top_block_projection",
          "paper_gap_linear",     "paper_gap_square",   "trace_coupled:0.5"};
}

/// Fields with a C^1 point-symmetric extension.
inline std::vector<std::string> c1_field_specs() {
  std::vector<std::string> out;
  for (const auto& s : all_field_specs())
    if (parse_field_spec<double>(s).meta.claims_c1_point_symmetric) out.push_back(s);
  return out;
}

/// All permutations of {0, ..., d-1}; p[k] is the source index of entry k.
inline std::vector<std::vector<Index>> permutations(Index d) {
  std::vector<Index> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), Index(0));
  std::vector<std::vector<Index>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline RealVector<double> permuted(const RealVector<double>& x, const std::vector<Index>& p) {
  RealVector<double> y(x.size());
  for (Index k = 0; k < x.size(); ++k) y(k) = x(p[static_cast<std::size_t>(k)]);
  return y;
}

/// Matrix of the permutation above: (P x)_k = x_{p[k]}.
inline RealMatrix<double> permutation_matrix(const std::vector<Index>& p) {
  const Index d = static_cast<Index>(p.size());
  RealMatrix<double> m = RealMatrix<double>::Zero(d, d);
  for (Index k = 0; k < d; ++k) m(k, p[static_cast<std::size_t>(k)]) = 1;
  return m;
}

/// Points (possibly with ties) for symmetry tests, kept away from the kinks of
/// abs (0) and soft_threshold (+-1) and inside the domain of sqrt_shifted.
inline std::vector<RealVector<double>> symmetry_points(Index d) {
  const double pool[4] = {1.7, -0.4, 0.6, -1.3};
  std::vector<RealVector<double>> out;
  // every assignment of pool values to coordinates (4^d points, d <= 4)
  Index total = 1;
  for (Index k = 0; k < d; ++k) total *= 4;
  for (Index code = 0; code < total; ++code) {
    RealVector<double> x(d);
    Index c = code;
    for (Index k = 0; k < d; ++k, c /= 4) x(k) = pool[c % 4];
    out.push_back(x);
  }
  return out;
}

/// Directional derivative of h -> L_F(diag(alpha) + hE) from exact values,
/// extrapolated to remove O(h) and O(h^2) error terms.
inline HMatrix exact_directional(const Field& f, const RealVector<double>& alpha, Index m, Index n, std::complex<double> tau, double h) {
  auto value = [&](double s) -> ComplexMatrix<double> {
    if (m == n) {
      RealVector<double> x = alpha;
      x(m) += s;
      return HMatrix::diagonal(extend_eval(f, x)).matrix();
    }
    return offdiag_exact_value(f, alpha, m, n, tau, s).matrix();
  };
  auto central = [&](double s) -> ComplexMatrix<double> { return (value(s) - value(-s)) / (2 * s); };
  auto r1 = [&](double s) -> ComplexMatrix<double> { return 2.0 * central(s / 2) - central(s); };
  return HMatrix::symmetrized((4.0 * r1(h / 2) - r1(h)) / 3.0);
}

/// Real-basis direction: E_mm, or tau E_mn + conj(tau) E_nm.
inline HMatrix basis_direction(Index d, Index m, Index n, std::complex<double> tau) {
  ComplexMatrix<double> e = ComplexMatrix<double>::Zero(d, d);
  if (m == n) {
    e(m, m) = 1;
  } else {
    e(m, n) = tau;
    e(n, m) = std::conj(tau);
  }
  return HMatrix(e);
}

inline bool has_tie(const RealVector<double>& x) { return has_ties(x); }

}  // namespace isocalc::testing

#endif  // ISOCALC_TESTS_SUPPORT_HPP
