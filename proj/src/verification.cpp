#include "isocalc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace isocalc {

namespace {

std::string vector_text(const RealVector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

double require_lipschitz(const Field& f, std::optional<double> override_value) {
  if (override_value) return *override_value;
  if (f.meta.lipschitz_constant) return *f.meta.lipschitz_constant;
  throw InvalidInput("field '" + f.meta.name + "' carries no Lipschitz constant");
}

Index field_dim(const Field& f, Index fallback) { return f.dim ? f.dim : fallback; }

}  // namespace

void PropertyReport::record(double violation, std::uint64_t seed, std::size_t trial, std::string detail) {
  ++trials;
  worst_violation = std::max(worst_violation, violation);
  if (!(violation <= tolerance) && witnesses.size() < kMaxWitnesses)
    witnesses.push_back({seed, trial, violation, std::move(detail)});
  finalize();
}

void PropertyReport::finalize() { passed = worst_violation <= tolerance; }

std::uint64_t child_seed(std::uint64_t suite_seed, std::size_t trial) {
  std::uint64_t z = suite_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------

ComplexMatrix<double> haar_unitary(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix<double> g(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = {normal(rng), normal(rng)};
  Eigen::HouseholderQR<ComplexMatrix<double>> qr(g);
  ComplexMatrix<double> q = qr.householderQ() * ComplexMatrix<double>::Identity(d, d);
  const ComplexMatrix<double>& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    const double mod = std::abs(r(j, j));
    if (mod > 0) q.col(j) *= r(j, j) / mod;
  }
  return q;
}

HMatrix random_hermitian(Index d, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal;
  ComplexMatrix<double> g(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = std::complex<double>(normal(rng), normal(rng)) * (scale / std::sqrt(2.0));
  return HMatrix::symmetrized((g + g.adjoint()) / 2.0);
}

HMatrix random_direction(Index d, std::mt19937_64& rng) {
  HMatrix e = random_hermitian(d, rng);
  return e * (1.0 / e.matrix().norm());
}

HMatrix basis_direction_diag(Index d, Index m) {
  ComplexMatrix<double> e = ComplexMatrix<double>::Zero(d, d);
  e(m, m) = 1;
  return HMatrix(e);
}

HMatrix basis_direction_sym(Index d, Index m, Index n) {
  ComplexMatrix<double> e = ComplexMatrix<double>::Zero(d, d);
  e(m, n) = 1;
  e(n, m) = 1;
  return HMatrix(e);
}

HMatrix basis_direction_antisym(Index d, Index m, Index n) {
  ComplexMatrix<double> e = ComplexMatrix<double>::Zero(d, d);
  e(m, n) = {0, 1};
  e(n, m) = {0, -1};
  return HMatrix(e);
}

PlantedMultiplicities random_multiplicity_spectrum(const std::vector<int>& multiplicities, double lo, double hi,
                                                   double min_gap, std::mt19937_64& rng) {
  const std::size_t k = multiplicities.size();
  if (k == 0) throw InvalidInput("no multiplicities given");
  const double room = (hi - lo) - static_cast<double>(k - 1) * min_gap;
  if (room < 0) throw InvalidInput("spectrum interval too short for the requested gaps");
  std::uniform_real_distribution<double> unif(0.0, room);
  std::vector<double> u(k);
  for (auto& x : u) x = unif(rng);
  std::sort(u.begin(), u.end());
  PlantedMultiplicities out;
  // Ascending values lo + u_i + i gap, emitted in decreasing order.
  for (std::size_t i = k; i-- > 0;)
    out.values.push_back({lo + u[i] + static_cast<double>(i) * min_gap, multiplicities[k - 1 - i]});
  return out;
}

ComplexMatrix<double> PlantedMatrix::projector(Index block) const {
  Index begin = 0;
  for (Index b = 0; b < block; ++b) begin += multiplicities[static_cast<std::size_t>(b)];
  const auto cols = V.middleCols(begin, multiplicities[static_cast<std::size_t>(block)]);
  return cols * cols.adjoint();
}

PlantedMatrix generate(const MatrixGenerator& gen) {
  if (gen.d < 1) throw InvalidInput("generator dimension must be positive");
  std::mt19937_64 rng(gen.seed);
  PlantedMultiplicities planted;
  if (const auto* ex = std::get_if<ExplicitSpectrum>(&gen.spectrum)) {
    if (static_cast<Index>(ex->values.size()) != gen.d) throw InvalidInput("explicit spectrum has wrong length");
    std::vector<double> v = ex->values;
    std::sort(v.begin(), v.end(), std::greater<>());
    for (double x : v) {
      if (!std::isfinite(x)) throw InvalidInput("explicit spectrum has non-finite value");
      if (!planted.values.empty() && planted.values.back().first == x)
        ++planted.values.back().second;
      else
        planted.values.push_back({x, 1});
    }
  } else if (const auto* pm = std::get_if<PlantedMultiplicities>(&gen.spectrum)) {
    planted = *pm;
    std::sort(planted.values.begin(), planted.values.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < planted.values.size(); ++i) {
      if (planted.values[i].second <= 0) throw InvalidInput("multiplicities must be positive");
      if (!std::isfinite(planted.values[i].first)) throw InvalidInput("planted value is not finite");
      if (i && planted.values[i].first == planted.values[i - 1].first)
        throw InvalidInput("planted values must be distinct");
    }
  } else {
    const auto& rs = std::get<RandomSimpleSpectrum>(gen.spectrum);
    planted = random_multiplicity_spectrum(std::vector<int>(static_cast<std::size_t>(gen.d), 1), rs.lo, rs.hi,
                                           rs.min_gap, rng);
  }
  const Index total = std::accumulate(planted.values.begin(), planted.values.end(), Index(0),
                                      [](Index acc, const auto& p) { return acc + p.second; });
  if (total != gen.d) throw InvalidInput("multiplicities do not sum to d");

  PlantedMatrix out;
  out.eigenvalues.resize(gen.d);
  out.distinct.resize(static_cast<Index>(planted.values.size()));
  Index pos = 0;
  for (std::size_t b = 0; b < planted.values.size(); ++b) {
    out.distinct(static_cast<Index>(b)) = planted.values[b].first;
    out.multiplicities.push_back(planted.values[b].second);
    for (int k = 0; k < planted.values[b].second; ++k) out.eigenvalues(pos++) = planted.values[b].first;
  }
  out.V = haar_unitary(gen.d, rng);
  out.A = HMatrix::symmetrized(out.V * out.eigenvalues.cast<std::complex<double>>().asDiagonal() * out.V.adjoint());
  return out;
}

// ---------------------------------------------------------------------------

HMatrix fd_directional(const Field& f, const HMatrix& a, const HMatrix& e, double h, const Options& opts) {
  if (!(h > 0)) throw InvalidInput("finite-difference step must be positive");
  const HMatrix plus = apply(f, a + e * h, opts);
  const HMatrix minus = apply(f, a - e * h, opts);
  return (plus - minus) * (1.0 / (2 * h));
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& r, double noise_floor) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < h.size() && i < r.size(); ++i)
    if (r[i] > noise_floor && h[i] > 0) {
      xs.push_back(std::log(h[i]));
      ys.push_back(std::log(r[i]));
    }
  if (xs.size() < 2) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::vector<double> first_order_remainders(const Field& f, const HMatrix& a, const HMatrix& e,
                                           const std::vector<double>& hs, const Options& opts) {
  const HMatrix deriv = frechet_apply(f, a, e, opts).result;
  const HMatrix base = apply(f, a, opts);
  std::vector<double> out;
  out.reserve(hs.size());
  for (double h : hs) out.push_back((apply(f, a + e * h, opts) - base - deriv * h).matrix().norm());
  return out;
}

PropertyReport check_frechet(const Field& f, const HMatrix& a, const HMatrix& e, const std::vector<double>& h_grid,
                             double tolerance, const Options& opts) {
  PropertyReport rep;
  rep.name = "frechet:" + f.meta.name;
  rep.tolerance = tolerance;
  const auto fr = frechet_apply(f, a, e, opts);
  const ComplexMatrix<double>& deriv = fr.result.matrix();
  const double scale = std::max(1.0, deriv.norm());
  double best = std::numeric_limits<double>::infinity();
  double best_h = 0;
  for (double h : h_grid) {
    const ComplexMatrix<double> coarse = fd_directional(f, a, e, h, opts).matrix();
    const ComplexMatrix<double> fine = fd_directional(f, a, e, h / 2, opts).matrix();
    const double raw = (coarse - deriv).norm() / scale;
    const double rich = ((4.0 * fine - coarse) / 3.0 - deriv).norm() / scale;
    const double err = std::min(raw, rich);
    if (err < best) {
      best = err;
      best_h = h;
    }
  }
  rep.metrics["best_h"] = best_h;
  rep.metrics["derivative_norm"] = deriv.norm();
  rep.metrics["max_quotient"] = fr.dd.max_quotient;
  rep.metrics["structure_residual"] = fr.structure_residual;
  if (f.meta.claims_c2) {
    const auto rem = first_order_remainders(f, a, e, kDefaultOrderGrid, opts);
    const double base_norm = apply(f, a, opts).matrix().norm();
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * (1 + base_norm);
    rep.metrics["order"] = loglog_slope(kDefaultOrderGrid, rem, floor);
  }
  std::ostringstream os;
  os << "d=" << a.dim() << " best_h=" << best_h;
  rep.record(best, 0, 0, os.str());
  return rep;
}

PropertyReport check_lipschitz(const Field& f, const std::vector<std::pair<HMatrix, HMatrix>>& pairs, double slack,
                               std::optional<double> lipschitz) {
  const double lip = require_lipschitz(f, lipschitz);
  PropertyReport rep;
  rep.name = "lipschitz:" + f.meta.name;
  rep.tolerance = slack;
  double max_ratio = 0, min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    const double lhs = (apply(f, a) - apply(f, b)).matrix().norm();
    const double dist = (a - b).matrix().norm();
    double violation;
    if (dist == 0) {
      violation = lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      violation = (lhs - lip * dist) / dist;
      max_ratio = std::max(max_ratio, lhs / dist);
      min_ratio = std::min(min_ratio, lhs / dist);
    }
    std::ostringstream os;
    os.precision(17);
    os << "pair " << i << " lhs=" << lhs << " dist=" << dist;
    rep.record(violation, 0, i, os.str());
  }
  rep.metrics["lipschitz_constant"] = lip;
  rep.metrics["max_ratio"] = max_ratio;
  rep.metrics["min_ratio"] = min_ratio;
  return rep;
}

PropertyReport lipschitz_counterexample(const Field& f, double eps, double ratio_floor) {
  PropertyReport rep;
  rep.name = "lipschitz_counterexample:" + f.meta.name;
  rep.expected_failure = true;
  rep.tolerance = 0;
  const HMatrix a = HMatrix::diagonal(RealVector<double>{{1 + eps, 1 - eps}});
  const HMatrix b = HMatrix::diagonal(RealVector<double>{{1 - eps, 1 + eps}});
  const double lhs = (apply(f, a) - apply(f, b)).matrix().norm();
  const double dist = (a - b).matrix().norm();
  const double ratio = lhs / dist;
  rep.metrics["eps"] = eps;
  rep.metrics["lhs"] = lhs;
  rep.metrics["dist"] = dist;
  rep.metrics["ratio"] = ratio;
  rep.metrics["ratio_floor"] = ratio_floor;
  std::ostringstream os;
  os.precision(17);
  os << "ratio=" << ratio << " floor=" << ratio_floor;
  rep.record(ratio_floor - ratio, 0, 0, os.str());
  return rep;
}

PropertyReport check_dd_bound(const Field& f, const std::vector<RealVector<double>>& alphas, double slack,
                              std::optional<double> lipschitz, const Options& opts) {
  const double lip = require_lipschitz(f, lipschitz);
  PropertyReport rep;
  rep.name = "dd_bound:" + f.meta.name;
  rep.tolerance = slack;
  double max_entry = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto dd = divided_difference(f, alphas[i], opts);
    const double m = dd.entries.cwiseAbs().maxCoeff();
    max_entry = std::max(max_entry, m);
    rep.record(m - lip, 0, i, "alpha=" + vector_text(alphas[i]));
  }
  rep.metrics["lipschitz_constant"] = lip;
  rep.metrics["max_entry"] = max_entry;
  return rep;
}

PropertyReport check_hoffman_wielandt(const std::vector<std::pair<HMatrix, HMatrix>>& pairs, double tolerance) {
  PropertyReport rep;
  rep.name = "hoffman_wielandt";
  rep.tolerance = tolerance;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, e] = pairs[i];
    const auto xi = eig_sorted(a + e).alpha;
    const auto alpha = eig_sorted(a).alpha;
    const double lhs = (xi - alpha).norm();
    const double rhs = e.matrix().norm();
    std::ostringstream os;
    os.precision(17);
    os << "pair " << i << " lhs=" << lhs << " rhs=" << rhs;
    rep.record(lhs - rhs, 0, i, os.str());
  }
  return rep;
}

// ---------------------------------------------------------------------------

TrialOutcome frechet_trial(const Field& f, const FrechetSuiteConfig& cfg, std::uint64_t seed) {
  const Index d = field_dim(f, cfg.d);
  std::mt19937_64 rng(seed);
  MatrixGenerator gen;
  gen.d = d;
  gen.seed = rng();
  if (cfg.multiplicities.empty())
    gen.spectrum = RandomSimpleSpectrum{cfg.lo, cfg.hi, cfg.min_gap};
  else
    gen.spectrum = random_multiplicity_spectrum(cfg.multiplicities, cfg.lo, cfg.hi, cfg.min_gap, rng);
  const PlantedMatrix planted = generate(gen);
  const HMatrix e = random_direction(d, rng);
  const auto rep = check_frechet(f, planted.A, e, cfg.h_grid, cfg.tolerance, cfg.options);
  TrialOutcome out;
  out.violation = rep.worst_violation;
  const auto it = rep.metrics.find("order");
  out.secondary = it == rep.metrics.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  out.detail = "spectrum=" + vector_text(planted.eigenvalues);
  return out;
}

std::vector<PropertyReport> frechet_suite(const Field& f, const FrechetSuiteConfig& cfg, std::uint64_t seed) {
  PropertyReport rep;
  rep.name = "frechet:" + f.meta.name;
  rep.tolerance = cfg.tolerance;
  PropertyReport order;
  order.name = "frechet_order:" + f.meta.name;
  order.tolerance = 0;
  double min_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    const std::uint64_t s = child_seed(seed, i);
    const auto out = frechet_trial(f, cfg, s);
    rep.record(out.violation, s, i, out.detail);
    if (f.meta.claims_c2) {
      min_order = std::min(min_order, out.secondary);
      order.record(cfg.min_order - out.secondary, s, i, out.detail);
    }
  }
  std::vector<PropertyReport> reports{rep};
  if (f.meta.claims_c2) {
    order.metrics["min_order"] = min_order;
    order.metrics["required_order"] = cfg.min_order;
    reports.push_back(order);
  }
  return reports;
}

std::pair<HMatrix, HMatrix> lipschitz_pair(Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const HMatrix a = random_hermitian(d, rng);
  // Perturbation sizes from 1e-2 to ~3 relative to A.
  std::uniform_real_distribution<double> expo(-2.0, 0.5);
  const double scale = std::pow(10.0, expo(rng));
  const HMatrix b = a + random_hermitian(d, rng, scale);
  return {a, b};
}

TrialOutcome lipschitz_trial(const Field& f, const LipschitzSuiteConfig& cfg, std::uint64_t seed) {
  const auto rep = check_lipschitz(f, {lipschitz_pair(field_dim(f, cfg.d), seed)}, cfg.slack, cfg.lipschitz);
  return {rep.worst_violation, rep.metrics.at("max_ratio"), {}};
}

PropertyReport lipschitz_suite(const Field& f, const LipschitzSuiteConfig& cfg, std::uint64_t seed) {
  std::vector<std::pair<HMatrix, HMatrix>> pairs;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    seeds.push_back(child_seed(seed, i));
    pairs.push_back(lipschitz_pair(field_dim(f, cfg.d), seeds.back()));
  }
  PropertyReport rep = check_lipschitz(f, pairs, cfg.slack, cfg.lipschitz);
  for (auto& w : rep.witnesses) w.seed = seeds[w.trial];
  return rep;
}

RealVector<double> sample_alpha(const Field& f, const DdBoundConfig& cfg, std::uint64_t seed) {
  const Index d = field_dim(f, cfg.d);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(cfg.lo, cfg.hi);
  std::bernoulli_distribution tie(f.meta.claims_c1_point_symmetric ? cfg.tie_probability : 0.0);
  std::vector<double> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = unif(rng);
  std::sort(v.begin(), v.end(), std::greater<>());
  for (std::size_t k = 1; k < v.size(); ++k)
    if (tie(rng)) v[k] = v[k - 1];
  return Eigen::Map<RealVector<double>>(v.data(), d);
}

TrialOutcome dd_bound_trial(const Field& f, const DdBoundConfig& cfg, std::uint64_t seed) {
  const auto alpha = sample_alpha(f, cfg, seed);
  const auto rep = check_dd_bound(f, {alpha}, cfg.slack, cfg.lipschitz, cfg.options);
  return {rep.worst_violation, rep.metrics.at("max_entry"), "alpha=" + vector_text(alpha)};
}

PropertyReport dd_bound_suite(const Field& f, const DdBoundConfig& cfg, std::uint64_t seed) {
  std::vector<RealVector<double>> alphas;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    seeds.push_back(child_seed(seed, i));
    alphas.push_back(sample_alpha(f, cfg, seeds.back()));
  }
  PropertyReport rep = check_dd_bound(f, alphas, cfg.slack, cfg.lipschitz, cfg.options);
  for (auto& w : rep.witnesses) w.seed = seeds[w.trial];
  return rep;
}

namespace {

std::pair<HMatrix, HMatrix> hw_pair(Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const HMatrix a = random_hermitian(d, rng);
  std::uniform_real_distribution<double> expo(-3.0, 0.5);
  const double scale = std::pow(10.0, expo(rng));
  return {a, random_hermitian(d, rng, scale)};
}

}  // namespace

TrialOutcome hoffman_wielandt_trial(const HoffmanWielandtConfig& cfg, std::uint64_t seed) {
  const auto rep = check_hoffman_wielandt({hw_pair(cfg.d, seed)}, cfg.tolerance);
  return {rep.worst_violation, 0, {}};
}

PropertyReport hoffman_wielandt_suite(const HoffmanWielandtConfig& cfg, std::uint64_t seed) {
  std::vector<std::pair<HMatrix, HMatrix>> pairs;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    seeds.push_back(child_seed(seed, i));
    pairs.push_back(hw_pair(cfg.d, seeds.back()));
  }
  PropertyReport rep = check_hoffman_wielandt(pairs, cfg.tolerance);
  for (auto& w : rep.witnesses) w.seed = seeds[w.trial];
  return rep;
}

}  // namespace isocalc
