#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace lqg {

// SplitMix64 finalizer (Steele, Lea, Flood 2014; Vigna 2015).  Used as the
// label-chaining hash for stream derivation and to expand seeds into state.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// Deterministic, collision-resistant mapping from (seed, labels) to a stream.
// Independent trials use labels = (experiment id, trial index).
inline RngStream derive_stream(std::uint64_t seed, std::span<const std::int64_t> labels) {
  std::uint64_t h = mix64(seed ^ 0x6c7967206c6162ULL);  // domain separation
  for (std::int64_t label : labels) {
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(label) + 0x9e3779b97f4a7c15ULL));
  }
  return RngStream{seed, h};
}

inline RngStream derive_stream(std::uint64_t seed, std::initializer_list<std::int64_t> labels) {
  return derive_stream(seed, std::span<const std::int64_t>(labels.begin(), labels.size()));
}

// xoshiro256++ (Blackman & Vigna), state expanded from (seed, stream_id)
// with SplitMix64.  One instance per Monte Carlo trial; never shared.
class Rng {
 public:
  explicit Rng(RngStream s) {
    std::uint64_t h = mix64(s.seed ^ mix64(s.stream_id));
    for (auto& w : state_) {
      h = mix64(h);
      w = h;
    }
    // avoid the all-zero state (astronomically unlikely, still guard)
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on (0,1); strictly positive so log() is safe
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // N(0,1) via Box-Muller, second value cached
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(th);
    have_cached_ = true;
    return r * std::cos(th);
  }

  double exponential() { return -std::log(uniform()); }

  // exact Poisson draw; sequential search for small means, PTRS rejection
  // (Hoermann 1993) for large ones
  std::uint64_t poisson(double mean);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace lqg
