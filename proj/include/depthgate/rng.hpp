#pragma once

// Deterministic random streams. Every stream is derived from a counter-style
// hash of (master seed, trial index, tag) so results never depend on the
// order in which trials are executed or on the number of worker threads.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "depthgate/model.hpp"

namespace depthgate {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
  return splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

/// Tags separating the independent streams used inside one trial.
enum class StreamTag : std::uint64_t { sample_p = 1, sample_q = 2, depth = 3, directions = 4, jitter = 5 };

/// mt19937_64 wrapper with portable uniform and normal draws. The standard
/// distributions are implementation-defined, so they are not used here.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, StreamTag tag) noexcept {
  return hash_combine(hash_combine(splitmix64(master), trial), static_cast<std::uint64_t>(tag));
}

inline Stream rng_for_trial(std::uint64_t master, std::uint64_t trial, StreamTag tag) {
  return Stream(derive_seed(master, trial, tag));
}

/// Content hash of a sample, used to key per-sample randomness (jitter).
inline std::uint64_t fingerprint(const FunctionalSample& s) {
  std::uint64_t h = splitmix64(s.size());
  for (double t : s.grid().points()) h = hash_combine(h, std::bit_cast<std::uint64_t>(t));
  for (double v : s.raw_values()) h = hash_combine(h, std::bit_cast<std::uint64_t>(v));
  for (std::uint8_t b : s.raw_mask()) h = hash_combine(h, b);
  return h;
}

inline std::uint64_t fingerprint(const MultivariateSample& s) {
  std::uint64_t h = hash_combine(splitmix64(s.size()), s.dim());
  for (double v : s.raw_values()) h = hash_combine(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace depthgate
