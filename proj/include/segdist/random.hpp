#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace segdist {

/// Reproducible standard-normal stream.
///
/// std::normal_distribution is implementation-defined, so the transform is
/// fixed here: 64-bit Mersenne Twister, 53-bit uniforms on (0, 1], and the
/// Box-Muller cosine/sine pair (cosine variate first).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  /// Seeds from two words via std::seed_seq, whose mixing is fully specified.
  GaussianStream(std::uint64_t seed, std::uint64_t salt) : engine_(make_seq(seed, salt)) {}

  double uniform() {
    // (k + 1) / 2^53 for k in [0, 2^53): never zero, so log() below is finite.
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static std::mt19937_64 make_seq(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return std::mt19937_64(seq);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace segdist
