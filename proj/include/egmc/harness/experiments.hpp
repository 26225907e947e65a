// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration behind the command-line tool.
//
// Exit status: 0 success, 2 invalid configuration, 3 output not writable,
// 4 numerical failure (calibration or undefined statistic).
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "egmc/analytic.hpp"
#include "egmc/calibration.hpp"
#include "egmc/engines.hpp"
#include "egmc/errors.hpp"
#include "egmc/harness/config.hpp"
#include "egmc/harness/table.hpp"
#include "egmc/metrics.hpp"
#include "egmc/version.hpp"

namespace egmc::harness {

enum ExitCode : int { kExitOk = 0, kExitInvalidConfig = 2, kExitUnwritable = 3, kExitNumerical = 4 };

/// Typed view of the settings map. Every value read (including defaults)
/// is recorded so the result metadata can reproduce the run.
class Settings {
 public:
  Settings(const ExperimentSpec& spec, std::ostream& log) : given_(spec.settings), log_(log) {}

  double require_double(const std::string& key) {
    auto v = given_.find(key);
    if (v == given_.end()) throw ConfigurationError("missing required key '" + key + "'");
    used_[key] = v->second;
    return parse_double(key, v->second);
  }

  double get_double(const std::string& key, double fallback) {
    if (given_.contains(key)) return require_double(key);
    used_[key] = format_double(fallback);
    return fallback;
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) {
    if (auto v = given_.find(key); v != given_.end()) {
      used_[key] = v->second;
      return parse_uint(key, v->second);
    }
    used_[key] = std::to_string(fallback);
    return fallback;
  }

  double alpha() {
    if (!given_.contains("alpha")) {
      log_ << "[egmc] alpha not set; using the calibrated value " << format_double(kCalibratedAlpha) << '\n';
    }
    const double a = get_double("alpha", kCalibratedAlpha);
    egmc::detail::require_config(a >= 0.0, "alpha must be non-negative");
    return a;
  }

  std::uint64_t seed() { return get_uint("seed", 1); }
  std::size_t particles() { return get_uint("n_particles", 100000); }

  /// Provided settings plus every default that was consulted.
  std::map<std::string, std::string> resolved() const {
    std::map<std::string, std::string> all = given_;
    for (const auto& [k, v] : used_) all[k] = v;
    return all;
  }

  std::ostream& log() { return log_; }

 private:
  std::map<std::string, std::string> given_;
  std::map<std::string, std::string> used_;
  std::ostream& log_;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::vector<double> alpha_grid(Settings& s, double lo, double hi, std::size_t n) {
  const double a = s.get_double("alpha_min", lo);
  const double b = s.get_double("alpha_max", hi);
  const std::size_t pts = s.get_uint("alpha_points", n);
  egmc::detail::require_config(pts >= 3, "alpha sweep needs at least three points");
  egmc::detail::require_config(a >= 0.0 && a < b, "alpha sweep range must be non-empty and increasing");
  return linspace(a, b, pts);
}

inline std::vector<double> step_ratio_grid(Settings& s, double lo, double hi, std::size_t n) {
  const double a = s.get_double("step_ratio_min", lo);
  const double b = s.get_double("step_ratio_max", hi);
  const std::size_t pts = s.get_uint("step_ratio_points", n);
  egmc::detail::require_config(pts >= 1, "step-size sweep range is empty");
  egmc::detail::require_config(a > 0.0 && (a < b || (pts == 1 && a == b)),
                               "step-size sweep range must be non-empty and increasing");
  if (pts == 1) return {a};
  return linspace(a, b, pts);
}

inline ChannelGeometry geometry(Settings& s) {
  const double D = s.require_double("D_um2_per_s");
  const double L = s.require_double("L_um");
  const double R = s.require_double("R_um");
  egmc::detail::require_config(R > 0.0 && L > R && D > 0.0, "geometry needs D > 0 and L > R > 0");
  return ChannelGeometry(R, L, D);
}

inline std::vector<Cell> row(std::initializer_list<Cell> cells) { return std::vector<Cell>(cells); }

inline std::int64_t as_int(std::uint64_t v) { return static_cast<std::int64_t>(v); }

}  // namespace detail

/// A validated experiment, ready to execute.
struct PreparedExperiment {
  std::function<ResultTable()> execute;
};

// ---------------------------------------------------------------------------
// Single runs

inline PreparedExperiment prepare_run1d(Settings& s, unsigned threads) {
  RunConfig1D c{Receiver1D{s.get_double("r_x_um", 0.0), s.require_double("L_um"), s.require_double("D_um2_per_s")},
                s.require_double("dt_s"), s.get_uint("n_steps", 100), s.particles(), s.alpha(), s.seed(), true, threads};
  egmc::detail::validate_run(c);
  return {[c, &s] {
    const auto t0 = detail::Clock::now();
    const auto record = run_1d(c);
    s.log() << "[egmc] run1d: " << record.absorbed() << " of " << c.n_particles << " absorbed in "
            << detail::seconds_since(t0) << " s\n";
    ResultTable t;
    t.columns = {"step", "t_s", "absorbed", "cumulative_fraction"};
    const auto cum = record.cumulative_fraction();
    for (std::size_t i = 0; i < c.n_steps; ++i) {
      t.add_row(detail::row({detail::as_int(i), static_cast<double>(i + 1) * c.dt, detail::as_int(record.counts[i]), cum[i]}));
    }
    double ai = std::nan("");
    if (record.absorbed() > 0) ai = absorption_index_1d(record, c.geometry);
    t.add_meta("result.absorbed", std::to_string(record.absorbed()));
    t.add_meta("result.survivors", std::to_string(record.survivors));
    t.add_meta("result.absorption_index_um", format_double(ai));
    t.add_meta("result.absorption_index_over_step", format_double(ai / std::sqrt(c.geometry.diffusion_um2_per_s * c.dt)));
    return t;
  }};
}

/// Validated 3D run from settings; n_steps defaults to max(100, ceil(6 t_peak / dt)).
inline RunConfig3D run3d_config(Settings& s, unsigned threads) {
  const ChannelGeometry g = detail::geometry(s);
  const double dt = s.require_double("dt_s");
  egmc::detail::require_config(dt > 0.0, "time step must be positive");
  RunConfig3D c{g, dt, s.get_uint("n_steps", default_step_count(g, dt)), s.particles(), s.alpha(), s.seed(), false,
                threads};
  egmc::detail::validate_run(c);
  return c;
}

inline PreparedExperiment prepare_run3d(Settings& s, unsigned threads) {
  const RunConfig3D c = run3d_config(s, threads);
  return {[c, &s] {
    const auto t0 = detail::Clock::now();
    const auto record = run_3d(c);
    s.log() << "[egmc] run3d: " << record.absorbed() << " of " << c.n_particles << " absorbed in "
            << detail::seconds_since(t0) << " s\n";
    const AnalyticCurve curve = discretize(c.geometry, c.dt, c.n_steps);
    const auto cum = record.cumulative_fraction();
    ResultTable t;
    t.columns = {"step", "t_s", "absorbed", "sim_cumulative", "anl_cumulative", "anl_expected_count"};
    for (std::size_t i = 0; i < c.n_steps; ++i) {
      t.add_row(detail::row({detail::as_int(i), curve.times[i], detail::as_int(record.counts[i]), cum[i],
                             curve.cumulative[i], static_cast<double>(c.n_particles) * curve.per_step_fraction[i]}));
    }
    const Locality loc = locality_check(c.geometry, c.dt);
    t.add_meta("result.absorbed", std::to_string(record.absorbed()));
    t.add_meta("result.survivors", std::to_string(record.survivors));
    t.add_meta("result.isdcd", format_double(isdcd(cum, curve.cumulative)));
    try {
      const ChiSquared chi = chi2_red(record.counts, curve.per_step_fraction, c.n_particles);
      t.add_meta("result.chi2_red", format_double(chi.reduced));
      t.add_meta("result.n_dof", std::to_string(chi.dof));
    } catch (const StatisticError&) {
      t.add_meta("result.chi2_red", "nan");
    }
    t.add_meta("result.step_length_ratio", format_double(loc.step_length_ratio));
    t.add_meta("result.locality_ok", loc.ok ? "true" : "false");
    return t;
  }};
}

// ---------------------------------------------------------------------------
// Calibration

inline void add_calibration_meta(ResultTable& t, const CalibrationResult& r, std::ostream& log) {
  for (const auto& w : r.warnings) log << "[egmc] warning: " << w << '\n';
  t.add_meta("result.alpha_opt", format_double(r.alpha_opt));
  t.add_meta("result.alpha_stderr", format_double(r.alpha_stderr));
  std::string coeffs;
  for (double c : r.fit_coefficients) coeffs += (coeffs.empty() ? "" : " ") + format_double(c);
  t.add_meta("result.fit_coefficients", coeffs);
}

inline PreparedExperiment prepare_calibrate1d(Settings& s, unsigned threads) {
  const double D = s.require_double("D_um2_per_s");
  const double L = s.require_double("L_um");
  const Receiver1D receiver{s.get_double("r_x_um", 0.0), L, D};
  receiver.validate();
  const std::size_t steps = s.get_uint("n_steps", 100);
  egmc::detail::require_config(steps >= 1, "need at least one step");
  const double dt = s.get_double("dt_s", default_dt_1d(receiver.gap(), D, steps));
  egmc::detail::require_config(dt > 0.0, "time step must be positive");
  const auto grid = detail::alpha_grid(s, 0.0, 1.5, 13);
  const std::size_t n = s.particles();
  const std::uint64_t seed = s.seed();
  return {[=, &s] {
    const auto t0 = detail::Clock::now();
    const CalibrationResult r = calibrate_1d(receiver, dt, steps, n, grid, seed, threads);
    s.log() << "[egmc] calibrate1d: " << grid.size() << " runs in " << detail::seconds_since(t0) << " s\n";
    ResultTable t;
    t.columns = {"alpha", "ai_over_step"};
    for (std::size_t k = 0; k < r.grid.size(); ++k) t.add_row(detail::row({r.grid[k], r.per_alpha_metric[k]}));
    add_calibration_meta(t, r, s.log());
    t.add_meta("result.alpha_analytic", format_double(alpha_analytic_1d()));
    return t;
  }};
}

inline ResultTable calibration_3d_table(const CalibrationResult& r, std::ostream& log) {
  ResultTable t;
  t.columns = {"alpha", "isdcd_mean", "isdcd_stderr"};
  for (std::size_t k = 0; k < r.grid.size(); ++k) {
    t.add_row(detail::row({r.grid[k], r.per_alpha_metric[k], r.per_alpha_stderr[k]}));
  }
  add_calibration_meta(t, r, log);
  t.add_meta("result.repeats_used", std::to_string(r.per_repeat_optimum.size()));
  return t;
}

inline PreparedExperiment prepare_calibrate3d(Settings& s, unsigned threads) {
  const ChannelGeometry g = detail::geometry(s);
  const std::size_t steps = s.get_uint("n_steps", 100);
  egmc::detail::require_config(steps >= 1, "need at least one step");
  const double dt = s.get_double("dt_s", 6.0 * g.peak_time() / static_cast<double>(steps));
  egmc::detail::require_config(dt > 0.0, "time step must be positive");
  const auto grid = detail::alpha_grid(s, 0.4, 1.2, 9);
  const std::size_t repeats = s.get_uint("n_repeats", 20);
  egmc::detail::require_config(repeats >= 2, "3D calibration needs at least two repeats");
  const std::size_t n = s.particles();
  const std::uint64_t seed = s.seed();
  for (double a : grid) {
    egmc::detail::validate_run(RunConfig3D{g, dt, steps, n, a, seed});
  }
  return {[=, &s] {
    const auto t0 = detail::Clock::now();
    const CalibrationResult r = calibrate_3d(g, dt, steps, n, grid, repeats, seed, threads);
    s.log() << "[egmc] calibrate3d: " << grid.size() * repeats << " runs in " << detail::seconds_since(t0) << " s\n";
    return calibration_3d_table(r, s.log());
  }};
}

// ---------------------------------------------------------------------------
// Noise and step-size studies

inline ResultTable noise_table(const NoiseProfile& p) {
  ResultTable t;
  t.columns = {"step", "t_s", "expected_count", "measured_std", "poisson_std", "band_halfwidth"};
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    t.add_row(detail::row({detail::as_int(i), p.times[i], p.expected_counts[i], p.measured_std[i], p.poisson_std[i],
                           p.band_halfwidth[i]}));
  }
  t.add_meta("result.fraction_within_1_band", format_double(p.fraction_within(1.0)));
  t.add_meta("result.fraction_within_2_band", format_double(p.fraction_within(2.0)));
  return t;
}

inline PreparedExperiment prepare_noise(Settings& s, unsigned threads) {
  const ChannelGeometry g = detail::geometry(s);
  const std::size_t steps = s.get_uint("n_steps", 1000);
  egmc::detail::require_config(steps >= 1, "need at least one step");
  const double dt = s.get_double("dt_s", 6.0 * g.peak_time() / static_cast<double>(steps));
  RunConfig3D c{g, dt, steps, s.particles(), s.alpha(), s.seed(), false, threads};
  egmc::detail::validate_run(c);
  const std::size_t repeats = s.get_uint("n_repeats", 30);
  egmc::detail::require_config(repeats >= 10, "noise profiling needs at least 10 repeats");
  return {[=, &s] {
    const auto t0 = detail::Clock::now();
    const NoiseProfile p = poisson_noise_profile(c, repeats);
    s.log() << "[egmc] noise: " << repeats << " runs in " << detail::seconds_since(t0) << " s\n";
    return noise_table(p);
  }};
}

/// Time step whose single-coordinate step length sqrt(2 D dt) equals ratio * (L - R).
inline double dt_for_step_ratio(const ChannelGeometry& g, double ratio) {
  const double step = ratio * g.gap();
  return step * step / (2.0 * g.diffusion());
}

struct InaccuracyCell {
  ChannelGeometry geometry;
  double step_ratio;
  InaccuracyResult result;
};

inline std::vector<InaccuracyCell> inaccuracy_sweep(const std::vector<ChannelGeometry>& cases,
                                                    const std::vector<double>& ratios, std::size_t n_particles,
                                                    std::uint64_t seed, unsigned threads, std::ostream& log) {
  std::vector<InaccuracyCell> out;
  std::uint64_t index = 0;
  for (const auto& g : cases) {
    for (double ratio : ratios) {
      const auto t0 = detail::Clock::now();
      const double dt = dt_for_step_ratio(g, ratio);
      out.push_back({g, ratio, relative_inaccuracy(g, dt, derive_seed(seed, index++), n_particles, std::nullopt, threads)});
      log << "[egmc] inaccuracy R=" << g.radius() << " L=" << g.distance() << " D=" << g.diffusion()
          << " ratio=" << ratio << ": " << out.back().result.ratio << " (" << detail::seconds_since(t0) << " s)\n";
    }
  }
  return out;
}

inline ResultTable inaccuracy_table(const std::vector<InaccuracyCell>& cells) {
  ResultTable t;
  t.columns = {"R_um",   "L_um",    "D_um2_per_s",          "dt_s",       "step_length_um", "step_ratio",
               "n_steps", "locality_ok", "relative_inaccuracy", "isdcd_egmc", "isdcd_mc"};
  for (const auto& c : cells) {
    const double dt = dt_for_step_ratio(c.geometry, c.step_ratio);
    t.add_row(detail::row({c.geometry.radius(), c.geometry.distance(), c.geometry.diffusion(), dt,
                           std::sqrt(2.0 * c.geometry.diffusion() * dt), c.result.locality.step_length_ratio,
                           detail::as_int(c.result.n_steps), std::string(c.result.locality.ok ? "true" : "false"),
                           c.result.ratio, c.result.isdcd_egmc, c.result.isdcd_mc}));
  }
  return t;
}

/// Largest step ratio for which the shifted boundary stays inside the transmitter distance.
inline double max_step_ratio(double alpha = kCalibratedAlpha) { return std::sqrt(2.0) / alpha; }

inline PreparedExperiment prepare_inaccuracy(Settings& s, unsigned threads) {
  const ChannelGeometry g = detail::geometry(s);
  const auto ratios = detail::step_ratio_grid(s, 0.1, 1.5, 8);
  egmc::detail::require_config(ratios.back() < max_step_ratio(),
                               "step ratios must stay below " + format_double(max_step_ratio()) +
                                   " or the shifted receiver reaches the transmitter");
  const std::size_t n = s.particles();
  const std::uint64_t seed = s.seed();
  return {[=, &s] { return inaccuracy_table(inaccuracy_sweep({g}, ratios, n, seed, threads, s.log())); }};
}

// ---------------------------------------------------------------------------
// Figure reproductions

struct Fig8Setting {
  double R, L, D;
  std::size_t iterations;
};

/// Geometries of the step-size study.
inline std::vector<ChannelGeometry> fig9_cases() {
  return {ChannelGeometry(10, 30, 80), ChannelGeometry(10, 35, 80), ChannelGeometry(5, 30, 200),
          ChannelGeometry(15, 50, 600)};
}

inline std::vector<double> fig9_step_ratios() { return {0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.7}; }

/// Spread of (R, L, D, iterations) for the 3D optimum study.
inline std::vector<Fig8Setting> fig8_settings() {
  return {{10, 35, 80, 100}, {5, 30, 200, 100}, {15, 50, 600, 100}, {10, 30, 80, 300}, {10, 50, 200, 1000}};
}

inline ResultTable repro_fig4(Settings& s, unsigned threads) {
  const std::size_t n = s.particles();
  const std::uint64_t seed = s.seed();
  const auto Ls = linspace(30, 200, 5);
  const auto Ds = linspace(80, 600, 5);
  const auto t0 = detail::Clock::now();
  const CalibrationResult r = calibrate_1d_grid(Ls, Ds, 100, n, default_alpha_grid_1d(), seed, threads);
  s.log() << "[egmc] fig4: " << Ls.size() * Ds.size() * 13 << " runs in " << detail::seconds_since(t0) << " s\n";
  ResultTable t;
  t.columns = {"alpha", "mean_ai_over_step", "stderr"};
  for (std::size_t k = 0; k < r.grid.size(); ++k) {
    t.add_row(detail::row({r.grid[k], r.per_alpha_metric[k], r.per_alpha_stderr[k]}));
  }
  add_calibration_meta(t, r, s.log());
  t.add_meta("result.alpha_analytic", format_double(alpha_analytic_1d()));
  return t;
}

inline ResultTable repro_fig5(Settings& s, unsigned threads) {
  const std::size_t n = s.particles();
  const std::uint64_t seed = s.seed();
  ResultTable t;
  t.columns = {"series", "engine", "n_steps", "step", "t_s", "hit_rate_per_s", "cumulative"};
  std::uint64_t index = 0;
  auto emit = [&](const std::string& series, const ChannelGeometry& g, std::size_t steps) {
    const double dt = 6.0 * g.peak_time() / static_cast<double>(steps);
    const AnalyticCurve curve = discretize(g, dt, steps);
    for (std::size_t i = 0; i < steps; ++i) {
      t.add_row(detail::row({series, std::string("anl"), detail::as_int(steps), detail::as_int(i), curve.times[i],
                             curve.per_step_fraction[i] / dt, curve.cumulative[i]}));
    }
    for (double alpha : {0.0, kCalibratedAlpha}) {
      const auto t0 = detail::Clock::now();
      const auto rec = run_3d(RunConfig3D{g, dt, steps, n, alpha, derive_seed(seed, index++), false, threads});
      const auto cum = rec.cumulative_fraction();
      const std::string engine = alpha == 0.0 ? "mc" : "egmc";
      for (std::size_t i = 0; i < steps; ++i) {
        t.add_row(detail::row({series, engine, detail::as_int(steps), detail::as_int(i), curve.times[i],
                               static_cast<double>(rec.counts[i]) / (static_cast<double>(n) * dt), cum[i]}));
      }
      t.add_meta("result.isdcd." + series + "." + engine + "." + std::to_string(steps), format_double(isdcd(cum, curve.cumulative)));
      s.log() << "[egmc] fig5 " << series << ' ' << engine << ' ' << steps << " steps: " << detail::seconds_since(t0) << " s\n";
    }
  };
  for (double L : {20.0, 30.0, 40.0, 50.0}) emit("L=" + format_double(L) + ";D=80", ChannelGeometry(10, L, 80), 300);
  for (double D : {80.0, 200.0, 600.0}) {
    const ChannelGeometry g(10, 30, D);
    emit("L=30;D=" + format_double(D), g, 300);
    emit("L=30;D=" + format_double(D), g, 3000);
  }
  return t;
}

inline ResultTable repro_fig6(Settings& s, unsigned threads) {
  const ChannelGeometry g(10, 35, 80);
  const std::size_t steps = 100;
  const double dt = 6.0 * g.peak_time() / steps;
  const std::size_t repeats = s.get_uint("n_repeats", 20);
  const CalibrationResult r = calibrate_3d(g, dt, steps, s.particles(), default_alpha_grid_3d(), repeats, s.seed(), threads);
  return calibration_3d_table(r, s.log());
}

inline ResultTable repro_fig7(Settings& s, unsigned threads) {
  const ChannelGeometry g(10, 35, 80);
  const std::size_t steps = 1000;
  RunConfig3D c{g, 6.0 * g.peak_time() / steps, steps, s.particles(), kCalibratedAlpha, s.seed(), false, threads};
  return noise_table(poisson_noise_profile(c, s.get_uint("n_repeats", 30)));
}

inline ResultTable repro_fig8(Settings& s, unsigned threads) {
  const std::size_t n = s.particles();
  const std::uint64_t seed = s.seed();
  const std::size_t repeats = s.get_uint("n_repeats", 10);
  ResultTable t;
  t.columns = {"R_um", "L_um", "D_um2_per_s", "iterations", "alpha_opt", "alpha_stderr", "chi2_red_egmc", "chi2_red_mc"};
  std::vector<double> values, errors;
  std::uint64_t index = 0;
  for (const auto& st : fig8_settings()) {
    const auto t0 = detail::Clock::now();
    const ChannelGeometry g(st.R, st.L, st.D);
    const double dt = 6.0 * g.peak_time() / static_cast<double>(st.iterations);
    const auto cal_seed = derive_seed(seed, index++);
    const CalibrationResult r = calibrate_3d(g, dt, st.iterations, n, default_alpha_grid_3d(), repeats, cal_seed, threads);
    for (const auto& w : r.warnings) s.log() << "[egmc] warning: " << w << '\n';
    const auto chi_seed = derive_seed(seed, index++);
    auto chi_at = [&](double alpha) {
      const auto rec = run_3d(RunConfig3D{g, dt, st.iterations, n, alpha, chi_seed, false, threads});
      const AnalyticCurve curve = discretize(g, dt, st.iterations);
      return chi2_red(rec.counts, curve.per_step_fraction, n).reduced;
    };
    t.add_row(detail::row({st.R, st.L, st.D, detail::as_int(st.iterations), r.alpha_opt, r.alpha_stderr,
                           chi_at(r.alpha_opt), chi_at(0.0)}));
    values.push_back(r.alpha_opt);
    errors.push_back(r.alpha_stderr);
    s.log() << "[egmc] fig8 setting " << index / 2 << ": " << detail::seconds_since(t0) << " s\n";
  }
  const WeightedMean wm = weighted_mean(values, errors);
  t.add_meta("result.weighted_mean_alpha", format_double(wm.mean));
  t.add_meta("result.weighted_mean_stderr", format_double(wm.standard_error));
  return t;
}

inline ResultTable repro_fig9(Settings& s, unsigned threads) {
  const std::size_t n = s.particles();
  const std::uint64_t seed = s.seed();
  return inaccuracy_table(inaccuracy_sweep(fig9_cases(), fig9_step_ratios(), n, seed, threads, s.log()));
}

inline PreparedExperiment prepare_repro(Settings& s, const ExperimentSpec& spec, unsigned threads) {
  const auto fig = spec.get("figure");
  if (!fig) throw ConfigurationError("missing required key 'figure'");
  const auto& figs = valid_figures();
  if (std::find(figs.begin(), figs.end(), *fig) == figs.end()) {
    throw ConfigurationError("unknown figure '" + *fig + "'; valid figures: " + detail::join(figs));
  }
  const std::string f = *fig;
  // Consult the shared settings now so they are validated before running.
  s.particles();
  s.seed();
  if (f == "fig6" || f == "fig7" || f == "fig8") {
    const std::size_t def = f == "fig6" ? 20 : f == "fig7" ? 30 : 10;
    const std::size_t reps = s.get_uint("n_repeats", def);
    egmc::detail::require_config(reps >= (f == "fig7" ? 10u : 2u), "too few repeats for " + f);
  }
  return {[f, threads, &s]() -> ResultTable {
    if (f == "fig4") return repro_fig4(s, threads);
    if (f == "fig5") return repro_fig5(s, threads);
    if (f == "fig6") return repro_fig6(s, threads);
    if (f == "fig7") return repro_fig7(s, threads);
    if (f == "fig8") return repro_fig8(s, threads);
    return repro_fig9(s, threads);
  }};
}

// ---------------------------------------------------------------------------

inline PreparedExperiment prepare(const ExperimentSpec& spec, Settings& s) {
  switch (spec.kind) {
    case ExperimentKind::run1d: return prepare_run1d(s, spec.threads);
    case ExperimentKind::run3d: return prepare_run3d(s, spec.threads);
    case ExperimentKind::calibrate1d: return prepare_calibrate1d(s, spec.threads);
    case ExperimentKind::calibrate3d: return prepare_calibrate3d(s, spec.threads);
    case ExperimentKind::noise_profile: return prepare_noise(s, spec.threads);
    case ExperimentKind::inaccuracy_sweep: return prepare_inaccuracy(s, spec.threads);
    case ExperimentKind::figure_repro: return prepare_repro(s, spec, spec.threads);
  }
  throw ConfigurationError("unknown experiment kind");
}

inline void write_table(std::ostream& os, const ResultTable& t, OutputFormat f) {
  if (f == OutputFormat::json) {
    write_json(os, t);
  } else {
    write_csv(os, t);
  }
}

/// Validate, execute and write one experiment. An empty output path writes to `out`.
inline int run_experiment(const ExperimentSpec& spec, std::ostream& log = std::clog, std::ostream& out = std::cout) {
  Settings settings(spec, log);
  PreparedExperiment job;
  try {
    job = prepare(spec, settings);
  } catch (const std::invalid_argument& e) {  // ConfigurationError, DomainError, ShapeError
    log << "[egmc] invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  std::ofstream file;
  if (!spec.output_path.empty()) {
    file.open(spec.output_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      log << "[egmc] cannot write '" << spec.output_path << "'\n";
      return kExitUnwritable;
    }
  }

  ResultTable table;
  try {
    table = job.execute();
  } catch (const CalibrationError& e) {
    log << "[egmc] calibration failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const StatisticError& e) {
    log << "[egmc] numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    log << "[egmc] invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  ResultTable full;
  full.add_meta("tool", "egmc");
  full.add_meta("version", kVersion);
  full.add_meta("experiment", std::string(to_string(spec.kind)));
  for (const auto& [k, v] : settings.resolved()) full.add_meta(k, v);
  for (auto& m : table.metadata) full.metadata.push_back(std::move(m));
  full.columns = std::move(table.columns);
  full.rows = std::move(table.rows);

  std::ostream& dest = spec.output_path.empty() ? out : static_cast<std::ostream&>(file);
  write_table(dest, full, spec.format);
  dest.flush();
  if (!dest) {
    log << "[egmc] failed writing '" << spec.output_path << "'\n";
    return kExitUnwritable;
  }
  return kExitOk;
}

}  // namespace egmc::harness
