// SPDX-License-Identifier: Apache-2.0
//
// Finite-step Brownian simulation of an absorbing receiver.
//
// With alpha = 0 this is the conventional Monte Carlo scheme: a particle is
// absorbed when its post-step position lies inside the receiver. With
// alpha > 0 the receiver boundary is pushed outwards by alpha * sqrt(D dt)
// (effective geometry), which cancels the bias of particles that crossed
// the true boundary between two recorded steps.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "egmc/analytic.hpp"
#include "egmc/errors.hpp"
#include "egmc/parallel.hpp"
#include "egmc/rng.hpp"
#include "egmc/stochastic.hpp"

namespace egmc {

/// Boundary shift that best cancels the 1D absorption-position bias.
inline constexpr double kCalibratedAlpha = 0.8235;

/// Half-line absorber x < r_x with the source at x = L.
struct Receiver1D {
  double position_um = 0.0;
  double source_um = 0.0;
  double diffusion_um2_per_s = 0.0;

  double gap() const noexcept { return source_um - position_um; }

  void validate() const {
    detail::require_domain(diffusion_um2_per_s > 0.0, "diffusion coefficient must be positive");
    detail::require_domain(source_um > position_um, "source must lie outside the receiver (L > r_x)");
  }

  bool operator==(const Receiver1D&) const = default;
};

/// Particles per independent random stream. Fixed so that results do not
/// depend on how many threads process the partitions.
inline constexpr std::size_t kPartitionSize = 8192;

template <class Geometry>
struct RunConfig {
  static constexpr std::size_t dimension = std::is_same_v<Geometry, Receiver1D> ? 1 : 3;

  Geometry geometry;
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::size_t n_particles = 100000;
  double alpha = 0.0;
  std::uint64_t seed = 1;
  bool record_positions = dimension == 1;
  unsigned threads = 1;
};

using RunConfig1D = RunConfig<Receiver1D>;
using RunConfig3D = RunConfig<ChannelGeometry>;

template <std::size_t Dim>
struct AbsorptionRecord {
  std::vector<std::uint64_t> counts;  ///< absorbed during step i
  std::optional<std::vector<Point<Dim>>> positions;
  std::uint64_t survivors = 0;
  std::uint64_t n_particles = 0;

  std::uint64_t absorbed() const noexcept {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return total;
  }

  /// Running absorbed fraction after each step.
  std::vector<double> cumulative_fraction() const {
    std::vector<double> out;
    out.reserve(counts.size());
    std::uint64_t acc = 0;
    for (auto c : counts) {
      acc += c;
      out.push_back(n_particles == 0 ? 0.0 : static_cast<double>(acc) / static_cast<double>(n_particles));
    }
    return out;
  }

  bool operator==(const AbsorptionRecord&) const = default;
};

inline double boundary_shift(double alpha, double diffusion, double dt) { return alpha * std::sqrt(diffusion * dt); }

inline double effective_boundary(const RunConfig1D& c) {
  return c.geometry.position_um + boundary_shift(c.alpha, c.geometry.diffusion_um2_per_s, c.dt);
}

inline double effective_boundary(const RunConfig3D& c) {
  return c.geometry.radius() + boundary_shift(c.alpha, c.geometry.diffusion(), c.dt);
}

namespace detail {

inline double diffusion_of(const Receiver1D& r) { return r.diffusion_um2_per_s; }
inline double diffusion_of(const ChannelGeometry& g) { return g.diffusion(); }
inline double source_of(const Receiver1D& r) { return r.source_um; }
inline double source_of(const ChannelGeometry& g) { return g.distance(); }

template <class Geometry>
void validate_run(const RunConfig<Geometry>& c) {
  if constexpr (std::is_same_v<Geometry, Receiver1D>) c.geometry.validate();
  require_config(c.dt > 0.0, "time step must be positive");
  require_config(c.n_steps >= 1, "need at least one step");
  require_config(c.alpha >= 0.0, "alpha must be non-negative");
  require_config(effective_boundary(c) < source_of(c.geometry),
                 "effective receiver boundary reaches the transmitter; reduce alpha or dt");
}

template <std::size_t Dim>
struct PartitionResult {
  std::vector<std::uint64_t> counts;
  std::vector<Point<Dim>> positions;
  std::uint64_t survivors = 0;
};

template <class Geometry>
auto simulate_partition(const RunConfig<Geometry>& c, std::size_t count, std::uint32_t stream_id) {
  constexpr std::size_t Dim = RunConfig<Geometry>::dimension;
  const double diffusion = diffusion_of(c.geometry);
  const double boundary = effective_boundary(c);

  Point<Dim> origin{};
  origin[Dim - 1] = source_of(c.geometry);
  ParticleEnsemble<Dim> ensemble(count, origin);
  RngStream rng(c.seed, stream_id);

  PartitionResult<Dim> out;
  out.counts.assign(c.n_steps, 0);
  for (std::size_t step = 0; step < c.n_steps && !ensemble.empty(); ++step) {
    step_ensemble(ensemble, rng, diffusion, c.dt);
    std::uint64_t absorbed = 0;
    for (std::size_t i = 0; i < ensemble.alive_count();) {
      const auto& p = ensemble[i];
      bool inside;
      if constexpr (Dim == 1) {
        inside = p[0] < boundary;
      } else {
        inside = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) < boundary;
      }
      if (inside) {
        if (c.record_positions) out.positions.push_back(p);
        ensemble.absorb(i);
        ++absorbed;
      } else {
        ++i;
      }
    }
    out.counts[step] = absorbed;
  }
  out.survivors = ensemble.alive_count();
  return out;
}

template <class Geometry>
auto run(const RunConfig<Geometry>& c) {
  constexpr std::size_t Dim = RunConfig<Geometry>::dimension;
  validate_run(c);

  const std::size_t n_parts = (c.n_particles + kPartitionSize - 1) / kPartitionSize;
  std::vector<PartitionResult<Dim>> parts(n_parts);
  parallel_for(n_parts, c.threads, [&](std::size_t k) {
    const std::size_t count = std::min(kPartitionSize, c.n_particles - k * kPartitionSize);
    parts[k] = simulate_partition(c, count, static_cast<std::uint32_t>(k));
  });

  AbsorptionRecord<Dim> record;
  record.n_particles = c.n_particles;
  record.counts.assign(c.n_steps, 0);
  if (c.record_positions) record.positions.emplace();
  for (auto& part : parts) {
    for (std::size_t i = 0; i < c.n_steps; ++i) record.counts[i] += part.counts[i];
    record.survivors += part.survivors;
    if (c.record_positions) {
      record.positions->insert(record.positions->end(), part.positions.begin(), part.positions.end());
    }
  }
  return record;
}

}  // namespace detail

/// 1D half-line absorber; particles start at x = L.
inline AbsorptionRecord<1> run_1d(const RunConfig1D& config) { return detail::run(config); }

/// 3D spherical absorber centred at the origin; particles start at (0, 0, L).
inline AbsorptionRecord<3> run_3d(const RunConfig3D& config) { return detail::run(config); }

/// Mean signed distance <x_absorbed - r_x> of the absorbed particles (um).
inline double absorption_index_1d(const AbsorptionRecord<1>& record, const Receiver1D& receiver) {
  if (!record.positions) throw StatisticError("absorption index needs recorded absorption positions");
  const auto& pos = *record.positions;
  if (pos.empty()) throw StatisticError("absorption index undefined: no particle was absorbed");
  double sum = 0.0;
  for (const auto& p : pos) sum += p[0] - receiver.position_um;
  return sum / static_cast<double>(pos.size());
}

}  // namespace egmc
