#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace keydyn {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seeded stream with hand-rolled transforms so that identical seeds give
// bit-identical sequences regardless of the standard library in use.
// derive() splits substreams from the root seed (not the current state),
// which keeps per-worker / per-sample streams independent of call order.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  uint64_t next() { return engine_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  int uniform_int(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }

  // Box-Muller; consumes two uniforms per draw
  double gaussian() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double gaussian(double mean, double std) { return mean + std * gaussian(); }

  Rng derive(std::initializer_list<uint64_t> path) const {
    uint64_t h = splitmix64(seed_ ^ 0x5851f42d4c957f2dull);
    for (uint64_t p : path) h = splitmix64(h ^ splitmix64(p));
    return Rng(h);
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace keydyn
