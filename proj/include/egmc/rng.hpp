// SPDX-License-Identifier: Apache-2.0
//
// Seeded, partitionable random streams.
//
// Every stream is a xoshiro256++ generator. The state for (seed, stream_id)
// is obtained by expanding the seed with SplitMix64 and then applying the
// 2^128-step jump polynomial stream_id times, so distinct stream ids of one
// seed are guaranteed non-overlapping subsequences of a 2^256 - 1 period.
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace egmc {

/// SplitMix64 finaliser; also used to derive child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministically derive the seed of sub-run `index` from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t s = base ^ (0xd1b54a32d192ed03ULL * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

/// xoshiro256++ with jump-ahead. Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256pp(std::uint64_t seed = 0) noexcept {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Advance by 2^128 draws.
  constexpr void jump() noexcept {
    constexpr std::array<std::uint64_t, 4> kJump = {0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
                                                    0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc{};
    for (std::uint64_t word : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b)) {
          for (int k = 0; k < 4; ++k) acc[k] ^= s_[k];
        }
        (*this)();
      }
    }
    s_ = acc;
  }

  constexpr bool operator==(const Xoshiro256pp&) const noexcept = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// One reproducible random stream: identical (seed, stream_id) gives an
/// identical sequence; distinct stream ids are independent.
class RngStream {
 public:
  using result_type = Xoshiro256pp::result_type;

  RngStream(std::uint64_t seed, std::uint32_t stream_id) : seed_(seed), stream_id_(stream_id), engine_(seed) {
    for (std::uint32_t i = 0; i < stream_id; ++i) engine_.jump();
  }

  static constexpr result_type min() noexcept { return Xoshiro256pp::min(); }
  static constexpr result_type max() noexcept { return Xoshiro256pp::max(); }
  result_type operator()() noexcept { return engine_(); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t stream_id() const noexcept { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint32_t stream_id_;
  Xoshiro256pp engine_;
};

}  // namespace egmc
