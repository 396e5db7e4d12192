/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>

namespace wvote {

// Purpose tags for deterministic substream derivation. Every random draw in
// the simulator comes from a substream keyed by (seed, purpose, a, b), so
// adding a new consumer with its own tag never perturbs existing sequences.
enum class RngPurpose : std::uint64_t {
  committee = 0x636f6d6d,  // stake-proportional committee sampling, a = slot
  validity = 0x76616c69,   // block validity draws, a = slot
  behavior = 0x62656861,   // mixed-policy behavior draws, a = slot, b = validator
  mc_chunk = 0x6d635f63,   // Monte-Carlo trial chunks, a = chunk index
  generic = 0x67656e65,
};

namespace detail {
// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Keyed SplitMix64 substream. Distinct keys give statistically independent
// sequences; the same key always replays the same sequence, on any platform.
class SubRng {
 public:
  SubRng(std::uint64_t seed, RngPurpose purpose, std::uint64_t a = 0,
         std::uint64_t b = 0) {
    state_ = detail::mix64(seed);
    state_ = detail::mix64(state_ ^ static_cast<std::uint64_t>(purpose));
    state_ = detail::mix64(state_ ^ a);
    state_ = detail::mix64(state_ ^ b);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace wvote
