#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "risloc/ris.hpp"
#include "risloc/scene.hpp"
#include "risloc/steering.hpp"
#include "risloc/waveform.hpp"

namespace risloc {

/// Radar data collected during one epoch: antennas x snapshots.
struct EpochData {
  int epoch_index = 0;
  Eigen::MatrixXcd y;
};

/// All epochs of one acquisition campaign.
struct DataCube {
  std::vector<EpochData> epochs;

  Eigen::Index n_epoch() const { return static_cast<Eigen::Index>(epochs.size()); }
  Eigen::Index n_pr() const { return epochs.empty() ? 0 : epochs.front().y.rows(); }
  Eigen::Index snapshots() const { return epochs.empty() ? 0 : epochs.front().y.cols(); }
};

/// Signal impinging on the surface at sample t: target bounces plus the
/// direct transmitter leak, each delayed and scaled by its path gain.
inline Eigen::VectorXcd ris_incident_signal(const Scene& scene, const Waveform& waveform,
                                            Eigen::Index t) {
  if (scene.ris_elements <= 0)
    throw std::invalid_argument("ris_incident_signal: scene has no surface elements");
  Eigen::VectorXcd r = Eigen::VectorXcd::Zero(scene.ris_elements);
  for (const auto& tgt : scene.targets) {
    const auto a = steering_vector(tgt.angle_ris_deg, scene.ris_elements,
                                   scene.spacing_wavelengths);
    r += tgt.gain_via_ris * waveform.at(t - tgt.delay_ap_target - tgt.delay_target_ris) *
         a.elements;
  }
  const auto a_leak =
      steering_vector(scene.angle_ap_ris_deg, scene.ris_elements, scene.spacing_wavelengths);
  r += scene.gain_ap_ris * waveform.at(t - scene.delay_ap_ris) * a_leak.elements;
  return r;
}

namespace detail {

/// Noise-free epoch synthesis shared by the public entry points. The time
/// base starts at the scene's worst-case delay so every tap stays in range.
inline Eigen::MatrixXcd synthesize_epoch(const Scene& scene,
                                         const Eigen::VectorXcd& phase_row,
                                         const Waveform& waveform, Eigen::Index snapshots) {
  if (phase_row.size() != scene.ris_elements)
    throw std::invalid_argument("simulate_epoch: phase row length != surface element count");
  const Eigen::Index offset = scene.max_total_delay();
  if (waveform.samples.size() < snapshots + offset)
    throw std::invalid_argument("simulate_epoch: waveform too short for requested snapshots");

  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(scene.pr_antennas, snapshots);

  // Surface-mirrored path. The per-epoch scalar coupling of each incoming
  // direction is phase_row . a_m(angle), so the reflected sample stream is a
  // weighted sum of delayed waveform taps.
  if (scene.ris_elements > 0 && std::abs(scene.gain_ris_pr) > 0.0) {
    Eigen::RowVectorXcd reflected = Eigen::RowVectorXcd::Zero(snapshots);
    auto add_path = [&](double angle_deg, std::complex<double> gain, Eigen::Index delay) {
      const auto a =
          steering_vector(angle_deg, scene.ris_elements, scene.spacing_wavelengths);
      const std::complex<double> coupling = phase_row.transpose() * a.elements;
      for (Eigen::Index l = 0; l < snapshots; ++l)
        reflected[l] += coupling * gain *
                        waveform.at(offset + l - scene.delay_ris_pr - delay);
    };
    for (const auto& tgt : scene.targets)
      add_path(tgt.angle_ris_deg, tgt.gain_via_ris,
               tgt.delay_ap_target + tgt.delay_target_ris);
    add_path(scene.angle_ap_ris_deg, scene.gain_ap_ris, scene.delay_ap_ris);
    const auto a_pr = steering_vector(scene.angle_ris_pr_deg, scene.pr_antennas,
                                      scene.spacing_wavelengths);
    y.noalias() += (scene.gain_ris_pr * a_pr.elements) * reflected;
  }

  // Direct transmitter line of sight.
  {
    const auto a = steering_vector(scene.angle_ap_pr_deg, scene.pr_antennas,
                                   scene.spacing_wavelengths);
    Eigen::RowVectorXcd s_row(snapshots);
    for (Eigen::Index l = 0; l < snapshots; ++l)
      s_row[l] = waveform.at(offset + l - scene.delay_ap_pr);
    y.noalias() += (scene.gain_ap_pr * a.elements) * s_row;
  }

  // Direct target bounces.
  for (const auto& tgt : scene.targets) {
    const auto a =
        steering_vector(tgt.angle_pr_deg, scene.pr_antennas, scene.spacing_wavelengths);
    Eigen::RowVectorXcd s_row(snapshots);
    for (Eigen::Index l = 0; l < snapshots; ++l)
      s_row[l] = waveform.at(offset + l - tgt.delay_ap_target - tgt.delay_target_pr);
    y.noalias() += (tgt.gain_direct * a.elements) * s_row;
  }

  return y;
}

inline void add_epoch_noise(Eigen::MatrixXcd& y, double noise_power, std::uint64_t seed) {
  if (noise_power <= 0.0) return;
  Rng rng(mix_seed(seed, 0x6e6f6973ull));
  for (Eigen::Index l = 0; l < y.cols(); ++l)
    for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, l) += rng.cgaussian(noise_power);
}

}  // namespace detail

/// One epoch of radar data under phase configuration phase_row, with
/// circular complex Gaussian noise of the scene's noise_power.
inline EpochData simulate_epoch(const Scene& scene, const Eigen::VectorXcd& phase_row,
                                const Waveform& waveform, Eigen::Index snapshots,
                                std::uint64_t seed) {
  EpochData out;
  out.y = detail::synthesize_epoch(scene, phase_row, waveform, snapshots);
  detail::add_epoch_noise(out.y, scene.noise_power, seed);
  return out;
}

/// Campaign synthesis with an explicit waveform. Epoch n uses row n of the
/// phase matrix and its own noise substream derived from (seed, n), so the
/// result does not depend on evaluation order.
inline DataCube simulate_campaign(const Scene& scene, const PhaseMatrix& phases,
                                  const Waveform& waveform, Eigen::Index snapshots,
                                  std::uint64_t seed) {
  if (phases.m() != scene.ris_elements)
    throw std::invalid_argument("simulate_campaign: phase matrix width != surface elements");
  DataCube cube;
  cube.epochs.resize(phases.n_epoch());
  for (Eigen::Index n = 0; n < phases.n_epoch(); ++n) {
    EpochData& e = cube.epochs[n];
    e.epoch_index = static_cast<int>(n);
    e.y = detail::synthesize_epoch(scene, phases.v.row(n).transpose(), waveform, snapshots);
    detail::add_epoch_noise(e.y, scene.noise_power, mix_seed(seed, 0x65706f63ull, n));
  }
  return cube;
}

/// Same, generating the campaign's waveform from the seed. The waveform is
/// drawn once and shared by all epochs; only the phase row and the noise
/// change from epoch to epoch.
inline DataCube simulate_campaign(const Scene& scene, const PhaseMatrix& phases,
                                  Eigen::Index snapshots, std::uint64_t seed,
                                  WaveformKind kind = WaveformKind::qpsk) {
  const Waveform waveform =
      generate_waveform(snapshots + scene.max_total_delay(), kind, seed);
  return simulate_campaign(scene, phases, waveform, snapshots, seed);
}

/// Mean per-entry power of the noise-free received data, i.e. the numerator
/// of the operating SNR definition, estimated over the whole campaign.
inline double measure_signal_power(const Scene& scene, const PhaseMatrix& phases,
                                   const Waveform& waveform, Eigen::Index snapshots) {
  Scene clean = scene;
  clean.noise_power = 0.0;
  const DataCube cube = simulate_campaign(clean, phases, waveform, snapshots, 0);
  double acc = 0.0;
  double count = 0.0;
  for (const auto& e : cube.epochs) {
    acc += e.y.squaredNorm();
    count += static_cast<double>(e.y.size());
  }
  return count > 0.0 ? acc / count : 0.0;
}

/// Noise variance that realizes the requested SNR against the measured
/// noise-free signal power.
inline double calibrate_noise(const Scene& scene, const Waveform& waveform,
                              double target_snr_db, const PhaseMatrix& phases,
                              Eigen::Index snapshots = 100) {
  const double p = measure_signal_power(scene, phases, waveform, snapshots);
  if (p <= 0.0)
    throw std::invalid_argument("calibrate_noise: all-zero signal, SNR undefined");
  return p / std::pow(10.0, target_snr_db / 10.0);
}

/// Convenience form for scenes whose surface path is inactive; otherwise the
/// expected power depends on the phase schedule and the caller must pass it.
inline double calibrate_noise(const Scene& scene, const Waveform& waveform,
                              double target_snr_db, Eigen::Index snapshots = 100) {
  if (scene.ris_elements > 0 && std::abs(scene.gain_ris_pr) > 0.0)
    throw std::invalid_argument(
        "calibrate_noise: surface path active, pass the phase matrix");
  return calibrate_noise(scene, waveform, target_snr_db,
                         PhaseMatrix::ones(1, scene.ris_elements), snapshots);
}

}  // namespace risloc
