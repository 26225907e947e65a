// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations for the tests. Nothing here calls the
// library's own quadrature or stepping code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "egmc/analytic.hpp"
#include "egmc/rng.hpp"

namespace oracle {

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                        int depth = 60) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Piecewise integration over a list of breakpoints; keeps the adaptive
/// rule from missing narrow features.
inline double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& edges,
                               double tol = 1e-13) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) sum += integrate(f, edges[i], edges[i + 1], tol);
  return sum;
}

inline double normal_cdf(double x, double sigma) { return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0))); }

/// Kolmogorov-Smirnov statistic of a sample against N(0, sigma^2).
inline double ks_statistic(std::vector<double> xs, double sigma) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = normal_cdf(xs[i], sigma);
    d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
  }
  return d;
}

struct McResult {
  std::vector<std::uint64_t> counts;
  std::uint64_t survivors = 0;
};

/// Textbook finite-step Monte Carlo for a sphere of radius R at the origin,
/// source at (0, 0, L): step every live particle, then remove those inside
/// R. Uses the documented stream layout: particles are split into blocks of
/// `block` and block k draws from RngStream(seed, k), x then y then z per
/// particle, live particles kept densely with swap-with-last removal.
inline McResult plain_mc_3d(double R, double L, double D, double dt, std::size_t steps, std::size_t n,
                            std::uint64_t seed, std::size_t block) {
  McResult out;
  out.counts.assign(steps, 0);
  const double sigma = std::sqrt(2.0 * D * dt);
  for (std::size_t k = 0; k * block < n; ++k) {
    egmc::RngStream rng(seed, static_cast<std::uint32_t>(k));
    boost::random::normal_distribution<double> normal(0.0, sigma);
    std::vector<double> x(std::min(block, n - k * block), 0.0), y(x.size(), 0.0), z(x.size(), L);
    for (std::size_t s = 0; s < steps && !x.empty(); ++s) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] += normal(rng);
        y[i] += normal(rng);
        z[i] += normal(rng);
      }
      for (std::size_t i = 0; i < x.size();) {
        if (std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]) < R) {
          x[i] = x.back();
          y[i] = y.back();
          z[i] = z.back();
          x.pop_back();
          y.pop_back();
          z.pop_back();
          ++out.counts[s];
        } else {
          ++i;
        }
      }
    }
    out.survivors += x.size();
  }
  return out;
}

}  // namespace oracle
