#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/random/poisson_distribution.hpp>
#include <gtest/gtest.h>

#include "egmc/metrics.hpp"

using namespace egmc;

namespace {

std::vector<std::uint64_t> poisson_counts(const AnalyticCurve& c, std::uint64_t n, RngStream& rng) {
  std::vector<std::uint64_t> out;
  for (double f : c.per_step_fraction) {
    const double mean = static_cast<double>(n) * f;
    if (mean <= 0.0) {
      out.push_back(0);
      continue;
    }
    boost::random::poisson_distribution<std::uint64_t, double> pois(mean);
    out.push_back(pois(rng));
  }
  return out;
}

}  // namespace

TEST(Isdcd, HandValues) {
  std::vector<double> a(100), b(100);
  std::iota(a.begin(), a.end(), 0.0);
  EXPECT_EQ(isdcd(a, a), 0.0);
  std::transform(a.begin(), a.end(), b.begin(), [](double x) { return x + 0.01; });
  EXPECT_NEAR(isdcd(b, a), 0.01, 1e-12);
  EXPECT_THROW(isdcd(a, std::vector<double>(99)), ShapeError);
}

TEST(Isdcd, InvariantUnderJointPermutationOnly) {
  std::vector<double> sim{0.1, 0.3, 0.2, 0.5}, anl{0.0, 0.35, 0.1, 0.45};
  const double base = isdcd(sim, anl);
  std::vector<std::size_t> idx{2, 0, 3, 1};
  std::vector<double> ps, pa;
  for (auto i : idx) {
    ps.push_back(sim[i]);
    pa.push_back(anl[i]);
  }
  EXPECT_NEAR(isdcd(ps, pa), base, 1e-15);
  EXPECT_GT(std::abs(isdcd(ps, anl) - base), 1e-3);
}

TEST(ChiSquared, ExactExpectationGivesZero) {
  const std::vector<double> frac{0.1, 0.2, 0.3};
  const std::vector<std::uint64_t> counts{100, 200, 300};
  const auto chi = chi2_red(counts, frac, 1000);
  EXPECT_EQ(chi.reduced, 0.0);
  EXPECT_EQ(chi.cells, 3u);
  EXPECT_EQ(chi.dof, 2u);
}

TEST(ChiSquared, PoolsLowExpectationCells) {
  // expected counts 2, 2, 2, 10, 1: pooled into (6), (10 + 1)
  const std::vector<double> frac{0.02, 0.02, 0.02, 0.1, 0.01};
  const std::vector<std::uint64_t> counts{3, 3, 3, 10, 1};
  const auto chi = chi2_red(counts, frac, 100);
  EXPECT_EQ(chi.cells, 2u);
  EXPECT_NEAR(chi.reduced, (9.0 - 6.0) * (9.0 - 6.0) / 6.0, 1e-12);
}

TEST(ChiSquared, Errors) {
  const std::vector<double> frac{0.001, 0.001};
  EXPECT_THROW(chi2_red(std::vector<std::uint64_t>{0, 0}, frac, 1000), StatisticError);
  EXPECT_THROW(chi2_red(std::vector<std::uint64_t>{0}, frac, 1000), ShapeError);
}

TEST(ChiSquared, SyntheticPoissonDataIsNearOne) {
  const ChannelGeometry g(10, 35, 80);
  const auto curve = discretize(g, 6.0 * g.peak_time() / 100, 100);
  RngStream rng(2024, 0);
  std::vector<double> values;
  std::size_t dof = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto chi = chi2_red(poisson_counts(curve, 100000, rng), curve.per_step_fraction, 100000);
    values.push_back(chi.reduced);
    dof = chi.dof;
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / 100.0;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= 99.0;
  EXPECT_NEAR(mean, 1.0, 0.1);
  const double expected_var = 2.0 / static_cast<double>(dof);
  EXPECT_GT(var, 0.6 * expected_var);
  EXPECT_LT(var, 1.5 * expected_var);
  // Any block of 20 trials averages inside [0.8, 1.2].
  for (int b = 0; b < 5; ++b) {
    const double m = std::accumulate(values.begin() + 20 * b, values.begin() + 20 * (b + 1), 0.0) / 20.0;
    EXPECT_GE(m, 0.8);
    EXPECT_LE(m, 1.2);
  }
}

TEST(ChiSquared, EffectiveGeometryBeatsPlainMonteCarlo) {
  const ChannelGeometry g(10, 35, 80);
  const double dt = 6.0 * g.peak_time() / 100;
  const auto egmc_run = evaluate_run(run_3d(RunConfig3D{g, dt, 100, 100000, kCalibratedAlpha, 21}), g, dt);
  const auto mc_run = evaluate_run(run_3d(RunConfig3D{g, dt, 100, 100000, 0.0, 21}), g, dt);
  EXPECT_GE(egmc_run.chi2_red, 0.7);
  EXPECT_LE(egmc_run.chi2_red, 1.3);
  EXPECT_GE(mc_run.chi2_red, 5.0 * egmc_run.chi2_red);
  EXPECT_LT(egmc_run.isdcd, mc_run.isdcd);
  EXPECT_TRUE(egmc_run.locality_ok);
}

TEST(StdSamplingError, MatchesGammaFormula) {
  for (std::size_t n : {2u, 5u, 30u, 100u}) {
    const double N = static_cast<double>(n);
    const double g = std::tgamma(N / 2.0) / std::tgamma((N - 1.0) / 2.0);
    const double var = 1.0 - 2.0 * g * g / (N - 1.0);
    EXPECT_NEAR(std_sampling_error(3.0, n) / (3.0 * std::sqrt(var)), 1.0, 1e-10) << n;
  }
  EXPECT_NEAR(std_sampling_error(1.0, 2), std::sqrt(1.0 - 2.0 / std::numbers::pi), 1e-14);
  // Large-n limit sigma / sqrt(2 (n - 1)).
  EXPECT_NEAR(std_sampling_error(1.0, 100000), 1.0 / std::sqrt(2.0 * 99999.0), 1e-6);
  EXPECT_THROW(std_sampling_error(1.0, 1), DomainError);
}

TEST(NoiseProfile, IdenticalRunsHaveZeroSpread) {
  const ChannelGeometry g(10, 35, 80);
  const auto curve = discretize(g, 0.05, 50);
  const auto one = run_3d(RunConfig3D{g, 0.05, 50, 2000, kCalibratedAlpha, 3}).counts;
  const std::vector<std::vector<std::uint64_t>> runs(12, one);
  const auto p = count_noise_profile(runs, curve, 2000);
  for (double s : p.measured_std) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(p.n_repeats, 12u);
}

TEST(NoiseProfile, ValidatesInput) {
  const ChannelGeometry g(10, 35, 80);
  RunConfig3D c{g, 0.05, 50, 100, kCalibratedAlpha, 3};
  EXPECT_THROW(poisson_noise_profile(c, 9), ConfigurationError);
  const auto curve = discretize(g, 0.05, 50);
  const std::vector<std::vector<std::uint64_t>> short_runs(3, std::vector<std::uint64_t>(49));
  EXPECT_THROW(count_noise_profile(short_runs, curve, 100), ShapeError);
}

TEST(NoiseProfile, SpreadScalesWithSquareRootOfParticles) {
  const ChannelGeometry g(10, 35, 80);
  RunConfig3D c{g, 6.0 * g.peak_time() / 100, 100, 10000, kCalibratedAlpha, 8};
  auto mean_var = [](const NoiseProfile& p) {
    double s = 0.0;
    for (double v : p.measured_std) s += v * v;
    return s;
  };
  const double v1 = mean_var(poisson_noise_profile(c, 40));
  c.n_particles = 20000;
  c.seed = 9;
  const double v2 = mean_var(poisson_noise_profile(c, 40));
  EXPECT_NEAR(std::sqrt(v2 / v1), std::sqrt(2.0), 0.1);
}

TEST(Locality, ExactRatios) {
  const ChannelGeometry g(10, 30, 80);
  const auto a = locality_check(g, 2.5);
  EXPECT_DOUBLE_EQ(a.step_length_ratio, 1.0);
  EXPECT_TRUE(a.ok);
  const auto b = locality_check(g, 10.0);
  EXPECT_DOUBLE_EQ(b.step_length_ratio, 2.0);
  EXPECT_FALSE(b.ok);
  const auto z = locality_check(g, 0.0);
  EXPECT_EQ(z.step_length_ratio, 0.0);
  EXPECT_TRUE(z.ok);
  EXPECT_THROW(locality_check(g, -1.0), DomainError);
}

TEST(DefaultStepCount, SixPeakTimesOrHundred) {
  const ChannelGeometry g(10, 30, 80);  // t_peak = 5/6 s
  EXPECT_EQ(default_step_count(g, 0.01), 500u);
  EXPECT_EQ(default_step_count(g, 0.1), 100u);
  EXPECT_THROW(default_step_count(g, 0.0), DomainError);
}

TEST(RelativeInaccuracy, SmallInsideLocalityRegime) {
  const ChannelGeometry g(10, 30, 80);
  const double step = 0.5 * g.gap();
  const auto r = relative_inaccuracy(g, step * step / 160.0, 77);
  EXPECT_TRUE(r.locality.ok);
  EXPECT_NEAR(r.locality.step_length_ratio, 0.5, 1e-12);
  EXPECT_EQ(r.n_steps, default_step_count(g, step * step / 160.0));
  EXPECT_LT(r.ratio, 0.2);
  EXPECT_DOUBLE_EQ(r.ratio, r.isdcd_egmc / r.isdcd_mc);
}
