// SPDX-License-Identifier: Apache-2.0
//
// Comparison measures between simulated and closed-form channel responses.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "egmc/analytic.hpp"
#include "egmc/engines.hpp"
#include "egmc/errors.hpp"

namespace egmc {

/// Cells whose expected count falls below this are pooled before the chi-squared sum.
inline constexpr double kChiSquaredFloor = 5.0;

/// Running absorbed fraction; counts[i] is the number absorbed in step i.
inline std::vector<double> cumulative_fraction(std::span<const std::uint64_t> counts, std::uint64_t n_particles) {
  std::vector<double> out;
  out.reserve(counts.size());
  std::uint64_t acc = 0;
  for (auto c : counts) {
    acc += c;
    out.push_back(n_particles == 0 ? 0.0 : static_cast<double>(acc) / static_cast<double>(n_particles));
  }
  return out;
}

/// Integrated squared difference of the cumulative distributions,
/// sum_i (sim[i] - anl[i])^2, both as fractions of the released molecules.
inline double isdcd(std::span<const double> sim_cumulative, std::span<const double> anl_cumulative) {
  if (sim_cumulative.size() != anl_cumulative.size()) {
    throw ShapeError("ISDCD needs simulated and analytic cumulatives on the same grid");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < sim_cumulative.size(); ++i) {
    const double d = sim_cumulative[i] - anl_cumulative[i];
    sum += d * d;
  }
  return sum;
}

struct ChiSquared {
  double reduced = 0.0;
  std::size_t cells = 0;  ///< after pooling
  std::size_t dof = 0;    ///< cells - 1
};

/// Reduced chi-squared of per-step absorbed counts against the Poisson model
/// sigma^2 = n_particles * dN_anl. Consecutive cells are pooled left to right
/// until their expected count reaches `floor`; a remainder below the floor
/// at the end joins the last pooled cell.
inline ChiSquared chi2_red(std::span<const std::uint64_t> sim_counts, std::span<const double> anl_per_step_fraction,
                           std::uint64_t n_particles, double floor = kChiSquaredFloor) {
  if (sim_counts.size() != anl_per_step_fraction.size()) {
    throw ShapeError("chi-squared needs simulated counts and analytic fractions on the same grid");
  }
  const double n = static_cast<double>(n_particles);
  std::vector<double> observed;
  std::vector<double> expected;
  double acc_obs = 0.0;
  double acc_exp = 0.0;
  for (std::size_t i = 0; i < sim_counts.size(); ++i) {
    acc_obs += static_cast<double>(sim_counts[i]);
    acc_exp += n * anl_per_step_fraction[i];
    if (acc_exp >= floor) {
      observed.push_back(acc_obs);
      expected.push_back(acc_exp);
      acc_obs = acc_exp = 0.0;
    }
  }
  if (expected.size() < 2) {
    throw StatisticError("chi-squared undefined: fewer than two cells reach the expected-count floor");
  }
  observed.back() += acc_obs;
  expected.back() += acc_exp;

  double sum = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const double d = observed[k] - expected[k];
    sum += d * d / expected[k];
  }
  const std::size_t dof = expected.size() - 1;
  return {sum / static_cast<double>(dof), expected.size(), dof};
}

/// Standard deviation of the sample standard deviation of n normal draws
/// with true deviation sigma: sigma * sqrt(1 - c4^2).
inline double std_sampling_error(double sigma, std::size_t n) {
  detail::require_domain(n >= 2, "need at least two samples");
  const double nn = static_cast<double>(n);
  const double log_ratio = std::lgamma(nn / 2.0) - std::lgamma((nn - 1.0) / 2.0);
  const double c4_sq = 2.0 / (nn - 1.0) * std::exp(2.0 * log_ratio);
  return sigma * std::sqrt(std::max(0.0, 1.0 - c4_sq));
}

/// Per-step spread of absorbed counts over repeated runs against the Poisson prediction.
struct NoiseProfile {
  std::size_t n_repeats = 0;
  std::vector<double> times;
  std::vector<double> expected_counts;  ///< n_particles * dN_anl
  std::vector<double> measured_std;     ///< sample std of (sim - anl) counts
  std::vector<double> poisson_std;      ///< sqrt(expected_counts)
  std::vector<double> band_halfwidth;   ///< one standard deviation of the sample std

  /// Fraction of steps, among those with expected count >= min_expected,
  /// whose measured deviation lies within k band half-widths of the prediction.
  double fraction_within(double k, double min_expected = kChiSquaredFloor) const {
    std::size_t used = 0;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < measured_std.size(); ++i) {
      if (expected_counts[i] < min_expected) continue;
      ++used;
      if (std::abs(measured_std[i] - poisson_std[i]) <= k * band_halfwidth[i]) ++inside;
    }
    if (used == 0) throw StatisticError("no step reaches the expected-count threshold");
    return static_cast<double>(inside) / static_cast<double>(used);
  }
};

inline NoiseProfile count_noise_profile(std::span<const std::vector<std::uint64_t>> runs, const AnalyticCurve& curve,
                                        std::uint64_t n_particles) {
  if (runs.size() < 2) throw StatisticError("noise profile needs at least two runs");
  const std::size_t steps = curve.size();
  for (const auto& r : runs) {
    if (r.size() != steps) throw ShapeError("every run must cover the analytic grid");
  }
  NoiseProfile p;
  p.n_repeats = runs.size();
  p.times = curve.times;
  const double n = static_cast<double>(n_particles);
  const double m = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < steps; ++i) {
    const double expected = n * curve.per_step_fraction[i];
    // The analytic offset is the same in every run, so the spread of
    // (sim - anl) is the spread of the raw counts.
    double mean = 0.0;
    for (const auto& r : runs) mean += static_cast<double>(r[i]);
    mean /= m;
    double ss = 0.0;
    for (const auto& r : runs) {
      const double d = static_cast<double>(r[i]) - mean;
      ss += d * d;
    }
    const double poisson = std::sqrt(expected);
    p.expected_counts.push_back(expected);
    p.measured_std.push_back(std::sqrt(ss / (m - 1.0)));
    p.poisson_std.push_back(poisson);
    p.band_halfwidth.push_back(std_sampling_error(poisson, runs.size()));
  }
  return p;
}

/// Repeat `config` with seeds derived from config.seed and profile the per-step spread.
inline NoiseProfile poisson_noise_profile(const RunConfig3D& config, std::size_t n_repeats) {
  detail::require_config(n_repeats >= 10, "noise profiling needs at least 10 repeats");
  std::vector<std::vector<std::uint64_t>> runs;
  runs.reserve(n_repeats);
  for (std::size_t k = 0; k < n_repeats; ++k) {
    RunConfig3D c = config;
    c.seed = derive_seed(config.seed, k);
    c.record_positions = false;
    runs.push_back(run_3d(c).counts);
  }
  return count_noise_profile(runs, discretize(config.geometry, config.dt, config.n_steps), config.n_particles);
}

struct Locality {
  double step_length_ratio = 0.0;  ///< sqrt(2 D dt) / (L - R)
  bool ok = true;
};

inline Locality locality_check(const ChannelGeometry& g, double dt) {
  detail::require_domain(dt >= 0.0, "time step must be non-negative");
  const double ratio = std::sqrt(2.0 * g.diffusion() * dt) / g.gap();
  return {ratio, ratio <= 1.0};
}

/// max(100, ceil(6 t_peak / dt)): cover six peak times, never fewer than 100 steps.
inline std::size_t default_step_count(const ChannelGeometry& g, double dt) {
  detail::require_domain(dt > 0.0, "time step must be positive");
  const double steps = std::ceil(6.0 * g.peak_time() / dt);
  return std::max<std::size_t>(100, static_cast<std::size_t>(steps));
}

struct InaccuracyResult {
  double ratio = 0.0;  ///< ISDCD(alpha = 0.8235) / ISDCD(alpha = 0)
  double isdcd_egmc = 0.0;
  double isdcd_mc = 0.0;
  std::size_t n_steps = 0;
  Locality locality;
};

/// Compare effective-geometry and plain Monte Carlo on the same grid, each
/// with its own seed derived from `seed`.
inline InaccuracyResult relative_inaccuracy(const ChannelGeometry& g, double dt, std::uint64_t seed,
                                            std::size_t n_particles = 100000,
                                            std::optional<std::size_t> n_steps = std::nullopt, unsigned threads = 1) {
  const std::size_t steps = n_steps.value_or(default_step_count(g, dt));
  const AnalyticCurve curve = discretize(g, dt, steps);

  auto isdcd_for = [&](double alpha, std::uint64_t run_seed) {
    RunConfig3D c{g, dt, steps, n_particles, alpha, run_seed};
    c.threads = threads;
    const auto record = run_3d(c);
    return isdcd(record.cumulative_fraction(), curve.cumulative);
  };

  InaccuracyResult r;
  r.n_steps = steps;
  r.locality = locality_check(g, dt);
  r.isdcd_egmc = isdcd_for(kCalibratedAlpha, derive_seed(seed, 0));
  r.isdcd_mc = isdcd_for(0.0, derive_seed(seed, 1));
  if (r.isdcd_mc == 0.0) throw StatisticError("relative inaccuracy undefined: ISDCD(alpha = 0) is zero");
  r.ratio = r.isdcd_egmc / r.isdcd_mc;
  return r;
}

struct ErrorReport {
  double isdcd = 0.0;
  double chi2_red = 0.0;
  std::size_t n_dof = 0;
  std::optional<double> relative_inaccuracy;
  bool locality_ok = true;
  double step_length_ratio = 0.0;
};

/// ISDCD, chi-squared and locality of one 3D run against its analytic curve.
inline ErrorReport evaluate_run(const AbsorptionRecord<3>& record, const ChannelGeometry& g, double dt) {
  const AnalyticCurve curve = discretize(g, dt, record.counts.size());
  ErrorReport rep;
  rep.isdcd = isdcd(record.cumulative_fraction(), curve.cumulative);
  const ChiSquared chi = chi2_red(record.counts, curve.per_step_fraction, record.n_particles);
  rep.chi2_red = chi.reduced;
  rep.n_dof = chi.dof;
  const Locality loc = locality_check(g, dt);
  rep.locality_ok = loc.ok;
  rep.step_length_ratio = loc.step_length_ratio;
  return rep;
}

}  // namespace egmc
