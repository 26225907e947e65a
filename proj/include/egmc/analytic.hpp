// SPDX-License-Identifier: Apache-2.0
//
// Closed-form channel response of a point transmitter and a perfectly
// absorbing sphere in unbounded 3D space, and the uniform-density
// approximation of the 1D boundary-shift parameter.
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "egmc/errors.hpp"

namespace egmc {

/// Spherical receiver of radius R centred at the origin, transmitter at distance L.
class ChannelGeometry {
 public:
  ChannelGeometry(double radius_um, double distance_um, double diffusion_um2_per_s)
      : radius_(radius_um), distance_(distance_um), diffusion_(diffusion_um2_per_s) {
    detail::require_domain(radius_ > 0.0, "receiver radius must be positive");
    detail::require_domain(distance_ > radius_, "transmitter must lie outside the receiver (L > R)");
    detail::require_domain(diffusion_ > 0.0, "diffusion coefficient must be positive");
  }

  double radius() const noexcept { return radius_; }
  double distance() const noexcept { return distance_; }
  double diffusion() const noexcept { return diffusion_; }

  /// L - R, the free path between transmitter and receiver surface.
  double gap() const noexcept { return distance_ - radius_; }
  /// Long-time absorbed fraction R/L.
  double asymptote() const noexcept { return radius_ / distance_; }
  /// Time at which the hitting rate peaks, (L - R)^2 / (6 D).
  double peak_time() const noexcept { return gap() * gap() / (6.0 * diffusion_); }

  bool operator==(const ChannelGeometry&) const = default;

 private:
  double radius_;
  double distance_;
  double diffusion_;
};

/// Flux through the receiver surface, per released molecule (1/s). Zero at t = 0.
inline double hit_rate(const ChannelGeometry& g, double t) {
  detail::require_domain(t >= 0.0, "time must be non-negative");
  if (t == 0.0) return 0.0;
  const double gap = g.gap();
  const double four_dt = 4.0 * g.diffusion() * t;
  return g.asymptote() * gap / (t * std::sqrt(std::numbers::pi * four_dt)) * std::exp(-gap * gap / four_dt);
}

/// Fraction of released molecules absorbed by time t: (R/L) erfc((L-R)/sqrt(4Dt)).
inline double cumulative_absorbed(const ChannelGeometry& g, double t) {
  detail::require_domain(t >= 0.0, "time must be non-negative");
  if (t == 0.0) return 0.0;
  return g.asymptote() * std::erfc(g.gap() / std::sqrt(4.0 * g.diffusion() * t));
}

/// Radial probability density (1/um^3) of a surviving molecule, built from
/// the free solution and a mirror sink at r = 2R - L.
inline double pdf_pseudo_real(const ChannelGeometry& g, double r, double t) {
  detail::require_domain(r >= g.radius(), "r must lie in the diffusion space r >= R");
  detail::require_domain(t > 0.0, "time must be positive");
  const double L = g.distance();
  const double four_dt = 4.0 * g.diffusion() * t;
  const double source = std::exp(-(r - L) * (r - L) / four_dt);
  const double sink = std::exp(-(r + L - 2.0 * g.radius()) * (r + L - 2.0 * g.radius()) / four_dt);
  return (source - sink) / (4.0 * std::numbers::pi * r * L * std::sqrt(std::numbers::pi * four_dt));
}

/// Intermediate quantities of the uniform-density estimate of the 1D shift.
struct AlphaApproximation {
  double erfc_integral;     ///< int_0^inf erfc(x) dx
  double xi_erfc_integral;  ///< int_0^inf x erfc(x) dx
  double alpha_prime;       ///< shift in units where the step kernel is exp(-x^2)
  double alpha;             ///< shift in units of sqrt(D dt)
};

inline AlphaApproximation alpha_approximation_1d() {
  // erfc(8) < 1e-28, so [0, 8] carries the integrals to double precision.
  constexpr double upper = 8.0;
  constexpr double tol = 1e-14;
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double m0 = Quadrature::integrate([](double x) { return std::erfc(x); }, 0.0, upper, 15, tol);
  const double m1 = Quadrature::integrate([](double x) { return x * std::erfc(x); }, 0.0, upper, 15, tol);
  const double alpha_prime = (0.5 - m1) / m0;
  // The exp(-x^2) kernel has variance 1/2; one coordinate step has variance 2 D dt.
  return {m0, m1, alpha_prime, 2.0 * alpha_prime};
}

/// Analytic estimate of the 1D boundary shift; sqrt(pi)/2.
inline double alpha_analytic_1d() { return alpha_approximation_1d().alpha; }

/// Closed-form response sampled on a simulation time grid.
///
/// Cell i covers (i dt, (i+1) dt]; `times[i]` is the cell's right edge and
/// `cumulative[i]` / `hit_rate[i]` are evaluated there.
struct AnalyticCurve {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> hit_rate;
  std::vector<double> cumulative;
  std::vector<double> per_step_fraction;

  std::size_t size() const noexcept { return times.size(); }
};

inline AnalyticCurve discretize(const ChannelGeometry& g, double dt, std::size_t n_steps) {
  detail::require_domain(dt > 0.0, "time step must be positive");
  detail::require_domain(n_steps >= 1, "need at least one step");
  AnalyticCurve curve;
  curve.dt = dt;
  curve.times.reserve(n_steps);
  curve.hit_rate.reserve(n_steps);
  curve.cumulative.reserve(n_steps);
  curve.per_step_fraction.reserve(n_steps);
  double previous = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t = static_cast<double>(i + 1) * dt;
    const double c = cumulative_absorbed(g, t);
    curve.times.push_back(t);
    curve.hit_rate.push_back(hit_rate(g, t));
    curve.cumulative.push_back(c);
    curve.per_step_fraction.push_back(c - previous);
    previous = c;
  }
  return curve;
}

}  // namespace egmc
