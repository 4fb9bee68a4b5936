#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "risloc/rng.hpp"

namespace risloc {

enum class WaveformKind { qpsk, gaussian };

inline WaveformKind waveform_kind_from_string(const std::string& s) {
  if (s == "qpsk") return WaveformKind::qpsk;
  if (s == "gaussian") return WaveformKind::gaussian;
  throw std::invalid_argument("unknown waveform kind: " + s);
}

/// Baseband transmit sequence with unit average power. The estimators never
/// look inside it; it only drives the synthesis.
struct Waveform {
  Eigen::VectorXcd samples;

  std::complex<double> at(Eigen::Index t) const {
    if (t < 0 || t >= samples.size())
      throw std::out_of_range("waveform index outside generated range");
    return samples[t];
  }

  double mean_power() const {
    return samples.size() == 0 ? 0.0 : samples.squaredNorm() / double(samples.size());
  }
};

/// Deterministic random payload. QPSK symbols are unit modulus by
/// construction; Gaussian sequences are rescaled to exact unit average power.
inline Waveform generate_waveform(Eigen::Index length, WaveformKind kind,
                                  std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("generate_waveform: length must be >= 1");
  Rng rng(mix_seed(seed, 0x77617665ull));  // dedicated waveform stream
  Waveform w;
  w.samples.resize(length);
  switch (kind) {
    case WaveformKind::qpsk:
      for (Eigen::Index i = 0; i < length; ++i) w.samples[i] = rng.qpsk();
      break;
    case WaveformKind::gaussian: {
      for (Eigen::Index i = 0; i < length; ++i) w.samples[i] = rng.cgaussian(1.0);
      const double p = w.mean_power();
      if (p > 0.0) w.samples *= 1.0 / std::sqrt(p);
      break;
    }
  }
  return w;
}

}  // namespace risloc
