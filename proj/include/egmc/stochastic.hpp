// SPDX-License-Identifier: Apache-2.0
//
// Brownian stepping kernel shared by the 1D and 3D engines.
// Units: micrometres and seconds.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "egmc/errors.hpp"

namespace egmc {

template <std::size_t Dim>
using Point = std::array<double, Dim>;

/// Standard deviation sqrt(2 D dt) of a single-coordinate Brownian increment.
inline double step_sigma(double diffusion, double dt) {
  detail::require_domain(diffusion > 0.0, "diffusion coefficient must be positive");
  detail::require_domain(dt > 0.0, "time step must be positive");
  return std::sqrt(2.0 * diffusion * dt);
}

/// One independent N(0, 2 D dt) draw per coordinate.
template <std::size_t Dim = 1, class Rng>
Point<Dim> gaussian_increment(Rng& rng, double diffusion, double dt) {
  boost::random::normal_distribution<double> normal(0.0, step_sigma(diffusion, dt));
  Point<Dim> dx{};
  for (auto& c : dx) c = normal(rng);
  return dx;
}

/// Positions of the particles that have not been absorbed yet.
///
/// Storage is dense; absorbing a particle moves the last one into its slot,
/// so particle order carries no meaning.
template <std::size_t Dim>
class ParticleEnsemble {
  static_assert(Dim == 1 || Dim == 3, "only 1D and 3D channels are modelled");

 public:
  static constexpr std::size_t dimension = Dim;

  ParticleEnsemble() = default;
  ParticleEnsemble(std::size_t count, const Point<Dim>& origin) : positions_(count, origin) {}

  std::size_t alive_count() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }

  std::span<Point<Dim>> positions() noexcept { return positions_; }
  std::span<const Point<Dim>> positions() const noexcept { return positions_; }
  const Point<Dim>& operator[](std::size_t i) const { return positions_[i]; }

  /// Remove particle i in O(1).
  void absorb(std::size_t i) {
    positions_[i] = positions_.back();
    positions_.pop_back();
  }

  bool operator==(const ParticleEnsemble&) const = default;

 private:
  std::vector<Point<Dim>> positions_;
};

/// Displace every particle by an independent Gaussian increment per coordinate.
template <std::size_t Dim, class Rng>
void step_ensemble(ParticleEnsemble<Dim>& ensemble, Rng& rng, double diffusion, double dt) {
  boost::random::normal_distribution<double> normal(0.0, step_sigma(diffusion, dt));
  for (auto& p : ensemble.positions()) {
    for (auto& c : p) c += normal(rng);
  }
}

}  // namespace egmc
