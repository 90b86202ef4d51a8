#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tlp {

// Deterministic random source. std::mt19937_64 has a standard-pinned output
// sequence, but std::normal_distribution does not, so the uniform and the
// Gaussian transforms are spelled out here. Same seed, same platform-independent
// stream of draws.
class Rng {
 public:
  // The seed is premixed through SplitMix64 before it reaches the engine:
  // mt19937_64's single-word init leaves nearby seeds (seed, seed+1, ...)
  // with correlated early output, which shows up as a shared error component
  // across Monte Carlo replications. SplitMix64 is a bijection, so distinct
  // seeds still yield distinct streams.
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on (0, 1): top 53 bits, zero rejected so log() below is safe.
  double uniform() {
    for (;;) {
      double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, cosine branch only: one normal per pair of uniforms. Wasteful
  // but keeps the draw order trivial to reason about.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Bernoulli(p) via one uniform.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 gen_;
};

}  // namespace tlp
