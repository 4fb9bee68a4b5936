#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace risloc {

/// Mixes a seed with stream tags so that independent consumers (epochs,
/// trials, sweep points, ...) get decorrelated substreams that do not depend
/// on evaluation order. SplitMix64 finalizer.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag_a,
                              std::uint64_t tag_b) {
  return mix_seed(mix_seed(seed, tag_a), tag_b);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag_a,
                              std::uint64_t tag_b, std::uint64_t tag_c) {
  return mix_seed(mix_seed(seed, tag_a, tag_b), tag_c);
}

/// Deterministic random source. Distributions are hand-rolled on top of the
/// raw engine output so that streams are reproducible independent of the
/// standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Circular complex Gaussian with E|z|^2 = variance.
  std::complex<double> cgaussian(double variance = 1.0) {
    const double s = std::sqrt(variance / 2.0);
    return {s * gaussian(), s * gaussian()};
  }

  /// Uniform phase on the unit circle.
  std::complex<double> unit_phasor() {
    return std::polar(1.0, uniform(0.0, 2.0 * M_PI));
  }

  /// One QPSK symbol, unit modulus: (+-1 +-j)/sqrt(2).
  std::complex<double> qpsk() {
    const std::uint64_t bits = engine_();
    const double a = (bits & 1u) ? M_SQRT1_2 : -M_SQRT1_2;
    const double b = (bits & 2u) ? M_SQRT1_2 : -M_SQRT1_2;
    return {a, b};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace risloc
