#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tubal {

/**
 * Seeded generator with a fully specified output sequence.
 *
 * Raw bits come from std::mt19937_64 (MT19937-64, whose sequence the C++
 * standard pins down). Conversions are done here rather than through
 * <random> distributions, whose algorithms are implementation-defined:
 *   uniform(): (bits >> 11) * 2^-53, in [0, 1)
 *   normal():  Box-Muller, u1 = 1 - uniform(), u2 = uniform(),
 *              returns sqrt(-2 ln u1) cos(2 pi u2), then the cached sine branch.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tubal
