#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace concord {

/// Seeded random generator: xoshiro256++ state-initialized via splitmix64.
///
/// The integer stream is a pure function of the seed (integer arithmetic
/// only), so identical seeds give identical streams on every platform.
/// Normal deviates use the Marsaglia polar transform on that stream; they
/// are bit-identical across runs on a given platform and differ across
/// platforms only if libm's log is not correctly rounded.
///
/// Not synchronized: use one Rng per task. Independent task streams come
/// from derive(), which reseeds from the original seed and a stream id.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent stream for a parallel or repeated task. Derivation uses
  /// only the constructor seed, never consumed state, so the mapping
  /// (seed, id) -> stream is stable regardless of prior draws.
  Rng derive(std::uint64_t stream_id) const {
    std::uint64_t x = seed_ ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1));
    return Rng(splitmix64(x));
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

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n) {
    // Lemire-style rejection keeps the draw exactly uniform.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via the polar method (log/sqrt only, no trig).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mu, double sd) { return mu + sd * normal(); }

  /// Chi-square with integer degrees of freedom (sum of squared normals).
  double chi_square(int dof) {
    double acc = 0.0;
    for (int i = 0; i < dof; ++i) {
      const double z = normal();
      acc += z * z;
    }
    return acc;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace concord
