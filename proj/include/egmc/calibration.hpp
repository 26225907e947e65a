// SPDX-License-Identifier: Apache-2.0
//
// Estimation of the boundary-shift parameter alpha.
//
// 1D: the mean absorption offset, in units of sqrt(D dt), is linear in alpha;
//     the optimum is the root of a least-squares line.
// 3D: ISDCD(alpha) is quadratic near its minimum; the optimum is the vertex
//     of a least-squares parabola, averaged over independent repeats.
//
// Within one configuration (1D) or one repeat (3D) every alpha reuses the same
// seed, so the alpha dependence is not masked by run-to-run noise.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "egmc/analytic.hpp"
#include "egmc/engines.hpp"
#include "egmc/errors.hpp"
#include "egmc/fitting.hpp"
#include "egmc/metrics.hpp"

namespace egmc {

struct CalibrationResult {
  double alpha_opt = 0.0;
  double alpha_stderr = 0.0;
  std::vector<double> fit_coefficients;  ///< (slope, intercept) or (a, b, c)
  std::vector<double> grid;              ///< alpha values that produced a metric
  std::vector<double> per_alpha_metric;
  std::vector<double> per_alpha_stderr;  ///< empty for single-configuration runs
  std::vector<double> per_repeat_optimum;
  std::vector<std::string> warnings;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  detail::require_domain(n >= 2, "linspace needs at least two points");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

inline std::vector<double> default_alpha_grid_1d() { return linspace(0.0, 1.5, 13); }
inline std::vector<double> default_alpha_grid_3d() { return linspace(0.4, 1.2, 9); }

/// Time step that places the 1D absorption front mid-run: n_steps * dt = L^2 / D.
inline double default_dt_1d(double source_um, double diffusion_um2_per_s, std::size_t n_steps) {
  detail::require_domain(source_um > 0.0 && diffusion_um2_per_s > 0.0 && n_steps > 0,
                         "need positive L, D and step count");
  return source_um * source_um / (diffusion_um2_per_s * static_cast<double>(n_steps));
}

/// Root of a least-squares line through (alpha, metric).
inline CalibrationResult calibrate_linear_root(std::span<const double> alpha_grid, std::span<const double> metric) {
  if (alpha_grid.size() < 3) throw CalibrationError("1D calibration needs at least three valid alpha values");
  const LinearFit fit = fit_line(alpha_grid, metric);
  double scale = 0.0;
  for (double m : metric) scale = std::max(scale, std::abs(m));
  const double span = alpha_grid.back() - alpha_grid.front();
  if (!(std::abs(fit.slope) * std::abs(span) > 1e-12 * scale) || !std::isfinite(fit.root())) {
    throw CalibrationError("absorption offset does not depend on alpha");
  }
  CalibrationResult r;
  r.alpha_opt = fit.root();
  r.alpha_stderr = fit.root_stderr();
  r.fit_coefficients = {fit.slope, fit.intercept};
  r.grid.assign(alpha_grid.begin(), alpha_grid.end());
  r.per_alpha_metric.assign(metric.begin(), metric.end());
  return r;
}

/// Single 1D configuration: offset AI / sqrt(D dt) per alpha, then the line root.
inline CalibrationResult calibrate_1d(const Receiver1D& receiver, double dt, std::size_t n_steps,
                                      std::size_t n_particles, std::span<const double> alpha_grid,
                                      std::uint64_t seed, unsigned threads = 1) {
  const double unit = std::sqrt(receiver.diffusion_um2_per_s * dt);
  std::vector<double> grid;
  std::vector<double> metric;
  std::vector<std::string> warnings;
  for (double alpha : alpha_grid) {
    RunConfig1D c{receiver, dt, n_steps, n_particles, alpha, seed, true, threads};
    const auto record = run_1d(c);
    if (record.absorbed() == 0) {
      warnings.push_back("alpha=" + std::to_string(alpha) + " dropped: no particle absorbed");
      continue;
    }
    grid.push_back(alpha);
    metric.push_back(absorption_index_1d(record, receiver) / unit);
  }
  CalibrationResult r = calibrate_linear_root(grid, metric);
  r.warnings = std::move(warnings);
  return r;
}

/// 1D calibration averaged over every (L, D) pair of the two lists. Each
/// pair uses dt = default_dt_1d(L, D, n_steps) and its own derived seed.
/// The line is fitted to the per-alpha means across configurations.
inline CalibrationResult calibrate_1d_grid(std::span<const double> sources_um, std::span<const double> diffusions,
                                           std::size_t n_steps, std::size_t n_particles,
                                           std::span<const double> alpha_grid, std::uint64_t seed,
                                           unsigned threads = 1) {
  const std::size_t n_alpha = alpha_grid.size();
  std::vector<std::vector<double>> samples(n_alpha);
  std::vector<std::string> warnings;
  std::uint64_t index = 0;
  for (double L : sources_um) {
    for (double D : diffusions) {
      const Receiver1D receiver{0.0, L, D};
      const double dt = default_dt_1d(L, D, n_steps);
      const double unit = std::sqrt(D * dt);
      const std::uint64_t cfg_seed = derive_seed(seed, index++);
      for (std::size_t k = 0; k < n_alpha; ++k) {
        RunConfig1D c{receiver, dt, n_steps, n_particles, alpha_grid[k], cfg_seed, true, threads};
        const auto record = run_1d(c);
        if (record.absorbed() == 0) {
          warnings.push_back("L=" + std::to_string(L) + " D=" + std::to_string(D) +
                             " alpha=" + std::to_string(alpha_grid[k]) + " dropped: no particle absorbed");
          continue;
        }
        samples[k].push_back(absorption_index_1d(record, receiver) / unit);
      }
    }
  }

  std::vector<double> grid, mean, errors;
  for (std::size_t k = 0; k < n_alpha; ++k) {
    const auto& s = samples[k];
    if (s.empty()) continue;
    double m = 0.0;
    for (double v : s) m += v;
    m /= static_cast<double>(s.size());
    double ss = 0.0;
    for (double v : s) ss += (v - m) * (v - m);
    const double se = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1) / static_cast<double>(s.size())) : 0.0;
    grid.push_back(alpha_grid[k]);
    mean.push_back(m);
    errors.push_back(se);
  }
  CalibrationResult r = calibrate_linear_root(grid, mean);
  r.per_alpha_stderr = std::move(errors);
  r.warnings = std::move(warnings);
  return r;
}

/// Parabola vertex per repeat; alpha_opt is their mean, alpha_stderr their
/// standard deviation. Repeats with a non-convex fit are discarded.
inline CalibrationResult calibrate_parabola_vertex(std::span<const double> alpha_grid,
                                                   const std::vector<std::vector<double>>& per_repeat_metric) {
  if (per_repeat_metric.empty()) throw CalibrationError("no repeats to calibrate");
  CalibrationResult r;
  r.grid.assign(alpha_grid.begin(), alpha_grid.end());
  std::size_t discarded = 0;
  for (std::size_t rep = 0; rep < per_repeat_metric.size(); ++rep) {
    const QuadraticFit fit = fit_parabola(alpha_grid, per_repeat_metric[rep]);
    if (!fit.convex()) {
      ++discarded;
      r.warnings.push_back("repeat " + std::to_string(rep) + " discarded: non-convex ISDCD fit");
      continue;
    }
    r.per_repeat_optimum.push_back(fit.vertex());
  }
  if (2 * discarded > per_repeat_metric.size() || r.per_repeat_optimum.empty()) {
    throw CalibrationError("majority of repeats produced a non-convex ISDCD fit");
  }

  const auto& v = r.per_repeat_optimum;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  r.alpha_opt = mean;
  r.alpha_stderr = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;

  const std::size_t n_rep = per_repeat_metric.size();
  for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
    double m = 0.0;
    for (const auto& row : per_repeat_metric) m += row[k];
    m /= static_cast<double>(n_rep);
    double s2 = 0.0;
    for (const auto& row : per_repeat_metric) s2 += (row[k] - m) * (row[k] - m);
    r.per_alpha_metric.push_back(m);
    r.per_alpha_stderr.push_back(n_rep > 1 ? std::sqrt(s2 / static_cast<double>(n_rep - 1) / static_cast<double>(n_rep)) : 0.0);
  }
  const QuadraticFit mean_fit = fit_parabola(alpha_grid, r.per_alpha_metric);
  r.fit_coefficients = {mean_fit.a, mean_fit.b, mean_fit.c};
  return r;
}

inline CalibrationResult calibrate_3d(const ChannelGeometry& g, double dt, std::size_t n_steps,
                                      std::size_t n_particles, std::span<const double> alpha_grid,
                                      std::size_t n_repeats, std::uint64_t seed, unsigned threads = 1) {
  detail::require_config(n_repeats >= 2, "3D calibration needs at least two repeats");
  detail::require_config(alpha_grid.size() >= 3, "3D calibration needs at least three alpha values");
  const AnalyticCurve curve = discretize(g, dt, n_steps);
  std::vector<std::vector<double>> metric(n_repeats, std::vector<double>(alpha_grid.size()));
  for (std::size_t rep = 0; rep < n_repeats; ++rep) {
    const std::uint64_t rep_seed = derive_seed(seed, rep);
    for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
      RunConfig3D c{g, dt, n_steps, n_particles, alpha_grid[k], rep_seed, false, threads};
      metric[rep][k] = isdcd(run_3d(c).cumulative_fraction(), curve.cumulative);
    }
  }
  return calibrate_parabola_vertex(alpha_grid, metric);
}

struct WeightedMean {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Inverse-variance weighted mean of independent estimates.
inline WeightedMean weighted_mean(std::span<const double> values, std::span<const double> stderrs) {
  if (values.size() != stderrs.size()) throw ShapeError("values and standard errors differ in length");
  if (values.empty()) throw StatisticError("weighted mean of nothing");
  double wsum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    detail::require_domain(stderrs[i] > 0.0, "standard errors must be positive");
    const double w = 1.0 / (stderrs[i] * stderrs[i]);
    wsum += w;
    acc += w * values[i];
  }
  return {acc / wsum, std::sqrt(1.0 / wsum)};
}

}  // namespace egmc
