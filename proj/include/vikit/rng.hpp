#pragma once

#include <cstdint>
#include <random>

#include "vikit/numerics.hpp"

namespace vikit {

// Deterministic random helper. mt19937_64 output is pinned by the standard,
// but the std distributions are not, so the mapping to doubles is done here.
// Identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Standard normal via Box-Muller; consumes two u01 draws per pair.
  double normal();

  Vector uniform_vec(std::size_t n, double lo, double hi);

  // Uniform over the solid ball of the given radius centred at the origin.
  Vector in_ball(std::size_t dim, double radius);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vikit
