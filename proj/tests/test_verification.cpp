#include <gtest/gtest.h>

#include "support.hpp"

using namespace isocalc;
using namespace isocalc::testing;
using V = RealVector<double>;
using CM = ComplexMatrix<double>;

namespace {

V vec(std::initializer_list<double> v) {
  V x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double a : v) x(i++) = a;
  return x;
}

HMatrix swap2() {
  CM m(2, 2);
  m << 0, 1, 1, 0;
  return HMatrix(m);
}

}  // namespace

TEST(Generator, PlantedSpectrumRecovered) {
  const auto p = generate({3, ExplicitSpectrum{{2, 0, 2}}, 42});
  EXPECT_EQ(p.multiplicities, (std::vector<int>{2, 1}));
  EXPECT_LE((eig_sorted(p.A).alpha - vec({2, 2, 0})).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((p.V.adjoint() * p.V - CM::Identity(3, 3)).norm(), 1e-13);
}

TEST(Generator, OneByOne) {
  const auto p = generate({1, ExplicitSpectrum{{-0.75}}, 1});
  ASSERT_EQ(p.A.dim(), 1);
  EXPECT_NEAR(p.A(0, 0).real(), -0.75, 1e-15);
  EXPECT_EQ(p.A(0, 0).imag(), 0);
}

TEST(Generator, DeterministicPerSeed) {
  const MatrixGenerator g{6, PlantedMultiplicities{{{1, 3}, {0, 2}, {-1, 1}}}, 99};
  EXPECT_TRUE(generate(g).A == generate(g).A);
  const MatrixGenerator other{6, PlantedMultiplicities{{{1, 3}, {0, 2}, {-1, 1}}}, 100};
  EXPECT_FALSE(generate(g).A == generate(other).A);
  const MatrixGenerator simple{5, RandomSimpleSpectrum{-1, 1, 0.3}, 3};
  const auto p = generate(simple);
  EXPECT_TRUE(p.A == generate(simple).A);
  for (Index k = 1; k < 5; ++k) EXPECT_GE(p.eigenvalues(k - 1) - p.eigenvalues(k), 0.3 - 1e-15);
}

TEST(Generator, RejectsInconsistentSpecs) {
  EXPECT_THROW(generate({3, PlantedMultiplicities{{{1, 2}}}, 0}), InvalidInput);
  EXPECT_THROW(generate({2, PlantedMultiplicities{{{1, 1}, {1, 1}}}, 0}), InvalidInput);
  EXPECT_THROW(generate({2, ExplicitSpectrum{{1}}, 0}), InvalidInput);
  EXPECT_THROW(generate({0, RandomSimpleSpectrum{}, 0}), InvalidInput);
  EXPECT_THROW(generate({5, RandomSimpleSpectrum{0, 1, 0.5}, 0}), InvalidInput);
}

TEST(Generator, HaarUnitaryIsUnitary) {
  std::mt19937_64 rng(1);
  const CM u = haar_unitary(7, rng);
  EXPECT_LE((u.adjoint() * u - CM::Identity(7, 7)).norm(), 1e-13);
}

TEST(ChildSeed, DistinctAndStable) {
  EXPECT_EQ(child_seed(7, 3), child_seed(7, 3));
  EXPECT_NE(child_seed(7, 3), child_seed(7, 4));
  EXPECT_NE(child_seed(7, 3), child_seed(8, 3));
}

TEST(FiniteDifference, Examples) {
  std::mt19937_64 rng(2);
  const HMatrix a = random_hermitian(4, rng), e = random_direction(4, rng);
  const auto id = parse_field_spec<double>("scalar_lift:identity");
  for (double h : {1e-1, 1e-4})
    EXPECT_LE((fd_directional(id, a, e, h) - e).matrix().norm(), 1e-10);
  CM expect(2, 2);
  expect << 0, 3, 3, 0;
  const auto sq = parse_field_spec<double>("scalar_lift:square");
  EXPECT_LE((fd_directional(sq, HMatrix::diagonal(vec({2, 1})), swap2(), 1e-4).matrix() - expect).norm(), 1e-7);
  EXPECT_LE(fd_directional(paper_gap_square<double>(), HMatrix::identity(2) * 0.5, random_direction(2, rng), 1e-4)
                .matrix()
                .norm(),
            1e-3);
  EXPECT_THROW(fd_directional(id, a, e, 0.0), InvalidInput);
}

TEST(LogLogSlope, RecoversPower) {
  const std::vector<double> h{1e-1, 1e-2, 1e-3};
  EXPECT_NEAR(loglog_slope(h, {3e-2, 3e-4, 3e-6}, 0.0), 2.0, 1e-12);
  EXPECT_NEAR(loglog_slope(h, {1e-1, 1e-2, 1e-20}, 1e-15), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(loglog_slope(h, {0, 0, 0}, 1e-15)));
}

TEST(CheckFrechet, ExpSimpleSpectrum) {
  std::mt19937_64 rng(3);
  const auto p = generate({5, RandomSimpleSpectrum{-1, 1, 0.2}, rng()});
  const auto rep = check_frechet(parse_field_spec<double>("scalar_lift:exp"), p.A, random_direction(5, rng));
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.worst_violation, 1e-6);
  EXPECT_GE(rep.metrics.at("order"), 1.9);
}

TEST(CheckFrechet, IdentityIsExact) {
  std::mt19937_64 rng(4);
  const HMatrix a = random_hermitian(5, rng);
  const auto rep = check_frechet(parse_field_spec<double>("scalar_lift:identity"), a, random_direction(5, rng));
  EXPECT_LE(rep.worst_violation, 1e-12);
}

TEST(CheckFrechet, NearDegenerateProjection) {
  const double eps = 1e-3;
  const HMatrix a = HMatrix::diagonal(vec({1 + eps, 1 - eps}));
  const auto rep = check_frechet(top_block_projection<double>(), a, swap2(), {1e-5, 1e-6});
  EXPECT_TRUE(rep.passed) << rep.worst_violation;
  EXPECT_NEAR(rep.metrics.at("max_quotient"), 1 / (2 * eps), 1e-6);
}

TEST(CheckLipschitz, IdentityIsSharp) {
  const auto rep = lipschitz_suite(parse_field_spec<double>("scalar_lift:identity"), {4, 100, 1e-9, {}}, 1);
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(std::abs(rep.metrics.at("max_ratio") - 1), 1e-12);
  EXPECT_LE(std::abs(rep.metrics.at("min_ratio") - 1), 1e-12);
}

TEST(CheckLipschitz, SoftThreshold) {
  const auto rep = lipschitz_suite(parse_field_spec<double>("soft_threshold:1"), {4, 100, 1e-9, {}}, 2);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.trials, 100u);
  EXPECT_LE(rep.metrics.at("max_ratio"), 1 + 1e-9);
}

TEST(CheckLipschitz, NeedsConstant) {
  EXPECT_THROW(check_lipschitz(top_block_projection<double>(), {}), InvalidInput);
}

TEST(Counterexample, TopBlockProjection) {
  const auto rep = lipschitz_counterexample(top_block_projection<double>());
  EXPECT_TRUE(rep.expected_failure);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.metrics.at("lhs"), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(rep.metrics.at("dist"), 2 * std::sqrt(2.0) * 1e-3, 1e-15);
  EXPECT_GE(rep.metrics.at("ratio"), 400);
  // a Lipschitz field does not reproduce the failure
  EXPECT_FALSE(lipschitz_counterexample(parse_field_spec<double>("scalar_lift:identity")).passed);
}

TEST(DdBound, Examples) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0, 1);
  std::vector<V> alphas;
  for (int i = 0; i < 50; ++i) {
    V a(4);
    for (auto& x : a) x = unif(rng);
    std::sort(a.begin(), a.end(), std::greater<>());
    alphas.push_back(a);
  }
  const auto sq = check_dd_bound(parse_field_spec<double>("scalar_lift:square"), alphas, 1e-8, 2.0);
  EXPECT_TRUE(sq.passed);
  EXPECT_LE(sq.metrics.at("max_entry"), 2.0);

  const auto st = dd_bound_suite(parse_field_spec<double>("soft_threshold:1"), {}, 3);
  EXPECT_TRUE(st.passed);
  EXPECT_LE(st.metrics.at("max_entry"), 1 + 1e-8);

  const auto c = dd_bound_suite(constant_field(1.0), {}, 4);
  EXPECT_TRUE(c.passed);
  EXPECT_EQ(c.metrics.at("max_entry"), 0);
}

TEST(DdBound, SamplesTiesForSmoothFields) {
  DdBoundConfig cfg;
  cfg.tie_probability = 1.0;
  const V a = sample_alpha(parse_field_spec<double>("scalar_lift:square"), cfg, 1);
  EXPECT_EQ(a.maxCoeff(), a.minCoeff());
  const V b = sample_alpha(parse_field_spec<double>("scalar_lift:abs"), cfg, 1);
  EXPECT_FALSE(has_ties(b));
}

TEST(HoffmanWielandt, Examples) {
  std::mt19937_64 rng(6);
  const HMatrix a = random_hermitian(6, rng);
  auto rep = check_hoffman_wielandt({{a, HMatrix::zero(6)}});
  EXPECT_LE(rep.worst_violation, 0.0);

  const double delta = 0.1;
  const HMatrix e = swap2() * delta;
  rep = check_hoffman_wielandt({{HMatrix::diagonal(vec({3, 1})), e}});
  // eigenvalues 2 +- sqrt(1 + delta^2): shift ~ delta^2 / 2 per eigenvalue
  const double shift = std::sqrt(1 + delta * delta) - 1;
  EXPECT_NEAR(rep.worst_violation, std::sqrt(2.0) * shift - std::sqrt(2.0) * delta, 1e-14);

  rep = hoffman_wielandt_suite({6, 100, 1e-10}, 7);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.trials, 100u);
}

TEST(Suites, DeterministicPerSeed) {
  const auto f = parse_field_spec<double>("scalar_lift:exp");
  FrechetSuiteConfig cfg;
  cfg.multiplicities = {2, 2, 1};
  const auto a = frechet_suite(f, cfg, 11), b = frechet_suite(f, cfg, 11);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].worst_violation, b[0].worst_violation);
  EXPECT_EQ(a[1].worst_violation, b[1].worst_violation);
  EXPECT_TRUE(a[0].passed);
  EXPECT_TRUE(a[1].passed);
}

TEST(Suites, FrechetAtDimensionOne) {
  FrechetSuiteConfig cfg;
  cfg.d = 1;
  const auto reps = frechet_suite(parse_field_spec<double>("scalar_lift:square"), cfg, 1);
  EXPECT_TRUE(reps[0].passed);
}

TEST(Suites, WitnessesReplay) {
  // negative slack turns every trial into a witness
  const auto f = parse_field_spec<double>("soft_threshold:1");
  LipschitzSuiteConfig cfg{4, 20, -10.0, {}};
  const auto rep = lipschitz_suite(f, cfg, 5);
  EXPECT_FALSE(rep.passed);
  ASSERT_EQ(rep.witnesses.size(), PropertyReport::kMaxWitnesses);
  for (const auto& w : rep.witnesses) EXPECT_EQ(lipschitz_trial(f, cfg, w.seed).violation, w.violation);

  DdBoundConfig dd;
  dd.slack = -10;
  dd.samples = 5;
  const auto drep = dd_bound_suite(f, dd, 6);
  for (const auto& w : drep.witnesses) EXPECT_EQ(dd_bound_trial(f, dd, w.seed).violation, w.violation);

  const HoffmanWielandtConfig hw{6, 5, -10};
  const auto hrep = hoffman_wielandt_suite(hw, 7);
  ASSERT_EQ(hrep.witnesses.size(), 5u);
  for (const auto& w : hrep.witnesses) EXPECT_EQ(hoffman_wielandt_trial(hw, w.seed).violation, w.violation);

  FrechetSuiteConfig fc;
  fc.tolerance = -1;
  fc.trials = 2;
  const auto fe = parse_field_spec<double>("scalar_lift:exp");
  const auto frep = frechet_suite(fe, fc, 8);
  ASSERT_EQ(frep[0].witnesses.size(), 2u);
  for (const auto& w : frep[0].witnesses) EXPECT_EQ(frechet_trial(fe, fc, w.seed).violation, w.violation);
}
