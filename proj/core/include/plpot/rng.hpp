#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace plpot {

// Deterministic random source. mt19937_64 has a standard-mandated output
// sequence; the distribution transforms below are written out explicitly so
// that streams are reproducible across standard libraries as well.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Box-Muller; one fresh pair per call, no cached state.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
  }

  double lognormal(double sigma) { return std::exp(sigma * normal()); }

  // Derives an independent stream; used to decorrelate per-item generators
  // in seeded families.
  Rng fork(std::uint64_t salt) {
    return Rng(raw() ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace plpot
