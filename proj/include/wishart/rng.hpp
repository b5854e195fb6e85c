#ifndef WISHART_RNG_HPP
#define WISHART_RNG_HPP

#include <complex>
#include <cstdint>

namespace wishart {

/// Per-trial random stream keyed by (seed, trial index): trials are
/// reproducible and independent of execution order. xoshiro256++ seeded
/// through splitmix64.
class TrialRng {
public:
  TrialRng(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (trial + 0x2545F4914F6CDD1DULL));
    for (auto& word : state_) {
      x += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
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

  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard complex Gaussian with E|X|^2 = 1: (g1 + i g2)/sqrt(2).
  std::complex<double> complex_gaussian() {
    double r = std::sqrt(-std::log(uniform()));
    double t = 6.283185307179586476925286766559 * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

  /// Standard real Gaussian (Box-Muller, one value per pair of uniforms).
  double gaussian() {
    double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(6.283185307179586476925286766559 * uniform());
  }

private:
  std::uint64_t state_[4];
};

} // namespace wishart

#endif // WISHART_RNG_HPP
