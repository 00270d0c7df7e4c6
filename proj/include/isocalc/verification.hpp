#ifndef ISOCALC_VERIFICATION_HPP
#define ISOCALC_VERIFICATION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "isocalc/spectral.hpp"

namespace isocalc {

using HMatrix = HermitianMatrix<double>;
using Field = VectorField<double>;
using Options = CalculusOptions<double>;

/// One failing trial. `seed` is the trial's own seed: rerunning the trial
/// function of the same suite with it reproduces `violation`.
struct Witness {
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  double violation = 0;
  std::string detail;
};

/// Outcome of a property check. `passed` is always worst_violation <= tolerance;
/// expected-failure checks define their violation so that failing as expected
/// yields a non-positive value.
struct PropertyReport {
  std::string name;
  std::size_t trials = 0;
  double worst_violation = -std::numeric_limits<double>::infinity();
  double tolerance = 0;
  bool passed = true;
  bool expected_failure = false;
  std::vector<Witness> witnesses;
  std::map<std::string, double> metrics;

  static constexpr std::size_t kMaxWitnesses = 8;

  void record(double violation, std::uint64_t seed, std::size_t trial, std::string detail = {});
  /// Sets `passed` from worst_violation and tolerance.
  void finalize();
};

/// Deterministic per-trial seed derived from a suite seed (splitmix64).
std::uint64_t child_seed(std::uint64_t suite_seed, std::size_t trial);

// ---------------------------------------------------------------------------
// Random matrices with planted spectra

struct ExplicitSpectrum {
  std::vector<double> values;
};
/// (value, multiplicity) pairs.
struct PlantedMultiplicities {
  std::vector<std::pair<double, int>> values;
};
/// d distinct values drawn uniformly from [lo, hi] with pairwise gaps >= min_gap.
struct RandomSimpleSpectrum {
  double lo = -1;
  double hi = 1;
  double min_gap = 0;
};

using SpectrumSpec = std::variant<ExplicitSpectrum, PlantedMultiplicities, RandomSimpleSpectrum>;

struct MatrixGenerator {
  Index d = 1;
  SpectrumSpec spectrum = RandomSimpleSpectrum{};
  std::uint64_t seed = 0;
};

/// A = V diag(eigenvalues) V* together with its plant.
struct PlantedMatrix {
  HMatrix A;
  ComplexMatrix<double> V;
  RealVector<double> eigenvalues;  ///< non-increasing; column k of V belongs to entry k
  std::vector<int> multiplicities;  ///< per distinct value, in decreasing order
  RealVector<double> distinct;

  /// Orthogonal projector onto the eigenspace of distinct value `block`.
  ComplexMatrix<double> projector(Index block) const;
};

PlantedMatrix generate(const MatrixGenerator& gen);

/// Distinct values for the given multiplicities, drawn from [lo, hi] with
/// neighbouring gaps of at least min_gap.
PlantedMultiplicities random_multiplicity_spectrum(const std::vector<int>& multiplicities, double lo, double hi,
                                                   double min_gap, std::mt19937_64& rng);

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal divided out.
ComplexMatrix<double> haar_unitary(Index d, std::mt19937_64& rng);

/// (G + G*)/2 for a complex Gaussian G with entry variance `scale`^2.
HMatrix random_hermitian(Index d, std::mt19937_64& rng, double scale = 1);

/// Random Hermitian direction with ||E||_F = 1.
HMatrix random_direction(Index d, std::mt19937_64& rng);

/// Real-vector-space basis of H_d used for directional checks: E_mm,
/// E_mn + E_nm and i(E_mn - E_nm).
HMatrix basis_direction_diag(Index d, Index m);
HMatrix basis_direction_sym(Index d, Index m, Index n);
HMatrix basis_direction_antisym(Index d, Index m, Index n);

// ---------------------------------------------------------------------------
// Oracles and property checks

/// (L_F(A + hE) - L_F(A - hE)) / 2h.
HMatrix fd_directional(const Field& f, const HMatrix& a, const HMatrix& e, double h, const Options& opts = {});

/// Least-squares slope of log r against log h over the points with r above
/// `noise_floor`; +inf when fewer than two points remain.
double loglog_slope(const std::vector<double>& h, const std::vector<double>& r, double noise_floor);

/// ||L_F(A + hE) - L_F(A) - h L_F'(E)||_F for each h.
std::vector<double> first_order_remainders(const Field& f, const HMatrix& a, const HMatrix& e,
                                           const std::vector<double>& hs, const Options& opts = {});

inline const std::vector<double> kDefaultFdGrid{1e-2, 1e-3, 1e-4, 1e-5};
inline const std::vector<double> kDefaultOrderGrid{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};

/// Compares frechet_apply against central differences of apply. For every h
/// in the grid the raw estimate at h and the Richardson combination
/// (4 D(h/2) - D(h)) / 3 are formed; the violation is the smallest error
/// relative to max(1, ||L_F'(E)||_F). Metrics include the remainder order over
/// kDefaultOrderGrid.
PropertyReport check_frechet(const Field& f, const HMatrix& a, const HMatrix& e,
                             const std::vector<double>& h_grid = kDefaultFdGrid, double tolerance = 1e-6,
                             const Options& opts = {});

/// ||L_F(A) - L_F(B)||_F <= L ||A - B||_F on each pair. The violation of a
/// pair is (lhs - L dist) / dist, checked against `slack`.
PropertyReport check_lipschitz(const Field& f, const std::vector<std::pair<HMatrix, HMatrix>>& pairs,
                               double slack = 1e-9, std::optional<double> lipschitz = std::nullopt);

/// Expected failure for a field that is not block-constant: A = diag(1+eps, 1-eps)
/// and B = diag(1-eps, 1+eps). Passes when ||L_F(A) - L_F(B)|| / ||A - B||
/// reaches `ratio_floor`.
PropertyReport lipschitz_counterexample(const Field& f, double eps = 1e-3, double ratio_floor = 400);

/// max |[F, alpha]_mn| <= L + slack over the given non-increasing alphas.
PropertyReport check_dd_bound(const Field& f, const std::vector<RealVector<double>>& alphas, double slack = 1e-8,
                              std::optional<double> lipschitz = std::nullopt, const Options& opts = {});

/// ||eig(A + E) - eig(A)||_2 <= ||E||_F with both spectra sorted.
PropertyReport check_hoffman_wielandt(const std::vector<std::pair<HMatrix, HMatrix>>& pairs, double tolerance = 1e-10);

// ---------------------------------------------------------------------------
// Seeded suites

struct TrialOutcome {
  double violation = 0;
  double secondary = 0;  ///< suite-specific (remainder order, ratio, ...)
  std::string detail;
};

struct FrechetSuiteConfig {
  Index d = 5;
  /// Empty: random simple spectrum.
  std::vector<int> multiplicities;
  std::size_t trials = 3;
  std::vector<double> h_grid = kDefaultFdGrid;
  double tolerance = 1e-6;
  double min_order = 1.9;
  double lo = -1;
  double hi = 1;
  double min_gap = 0.3;
  Options options;
};

TrialOutcome frechet_trial(const Field& f, const FrechetSuiteConfig& cfg, std::uint64_t seed);

/// Runs check_frechet on planted-spectrum matrices. Returns the derivative
/// report and, for fields claiming C^2, a remainder-order report whose
/// violation is min_order - order.
std::vector<PropertyReport> frechet_suite(const Field& f, const FrechetSuiteConfig& cfg, std::uint64_t seed);

struct LipschitzSuiteConfig {
  Index d = 4;
  std::size_t trials = 200;
  double slack = 1e-9;
  std::optional<double> lipschitz;
};

std::pair<HMatrix, HMatrix> lipschitz_pair(Index d, std::uint64_t seed);
TrialOutcome lipschitz_trial(const Field& f, const LipschitzSuiteConfig& cfg, std::uint64_t seed);
PropertyReport lipschitz_suite(const Field& f, const LipschitzSuiteConfig& cfg, std::uint64_t seed);

struct DdBoundConfig {
  Index d = 4;
  std::size_t samples = 100;
  double slack = 1e-8;
  double lo = -3;
  double hi = 3;
  /// Probability that a coordinate repeats its predecessor (only used for
  /// fields claiming C^1 point symmetry).
  double tie_probability = 0.3;
  std::optional<double> lipschitz;
  Options options;
};

RealVector<double> sample_alpha(const Field& f, const DdBoundConfig& cfg, std::uint64_t seed);
TrialOutcome dd_bound_trial(const Field& f, const DdBoundConfig& cfg, std::uint64_t seed);
PropertyReport dd_bound_suite(const Field& f, const DdBoundConfig& cfg, std::uint64_t seed);

struct HoffmanWielandtConfig {
  Index d = 6;
  std::size_t trials = 200;
  double tolerance = 1e-10;
};

TrialOutcome hoffman_wielandt_trial(const HoffmanWielandtConfig& cfg, std::uint64_t seed);
PropertyReport hoffman_wielandt_suite(const HoffmanWielandtConfig& cfg, std::uint64_t seed);

}  // namespace isocalc

#endif  // ISOCALC_VERIFICATION_HPP
