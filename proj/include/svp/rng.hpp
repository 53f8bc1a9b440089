#pragma once
// Deterministic 64-bit RNG used everywhere: splitmix64 for the stream,
// with uniform / normal (Box-Muller) / sphere-direction helpers.  The
// algorithm is pinned here so that seeded outputs are reproducible
// byte-for-byte across platforms (std:: distributions are not).

#include <cmath>
#include <cstdint>

#include "svp/vec.hpp"

namespace svp {

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    // splitmix64 (Steele, Lea, Flood 2014); public-domain reference constants.
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller; discards the paired sample to keep the stream simple.
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Vec normal_vec(size_t d) {
    Vec v(d);
    for (auto& x : v) x = normal();
    return v;
  }

  // Uniform direction on the unit sphere of R^d.
  Vec sphere_dir(size_t d) {
    for (;;) {
      Vec v = normal_vec(d);
      double n = norm(v);
      if (n > 1e-12) return scale(v, 1.0 / n);
    }
  }

 private:
  uint64_t state_;
};

} // namespace svp
