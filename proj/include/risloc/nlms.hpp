#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "risloc/angles.hpp"
#include "risloc/beamform.hpp"
#include "risloc/parallel.hpp"
#include "risloc/ris.hpp"
#include "risloc/steering.hpp"

namespace risloc {

struct NlmsConfig {
  double mu = 0.1;              // adaptation constant
  AngleGrid grid;               // scan grid, defaults to [-90, 90] step 0.5
  double peak_threshold = 0.5;  // fraction of the normalized maximum
  double epsilon_norm = 1e-12;  // keeps the update total on all-zero columns
  double spacing_wavelengths = 0.5;
  unsigned n_threads = 1;       // angle-level parallelism of the batch filter

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("nlms: mu must be > 0");
    if (!(peak_threshold > 0.0 && peak_threshold < 1.0))
      throw std::invalid_argument("nlms: peak threshold must lie in (0, 1)");
    if (!(epsilon_norm > 0.0)) throw std::invalid_argument("nlms: epsilon_norm must be > 0");
  }
};

/// Per-angle output power of the converged filter bank.
struct Spectrum {
  AngleGrid grid;
  Eigen::ArrayXd p;
  bool normalized = false;

  void save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "angle_deg," << (normalized ? "normalized_power" : "power") << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.6g,%.6g\n", grid[static_cast<std::size_t>(i)],
                    p[i]);
      out << buf;
    }
  }
};

/// Joint detection result: every reported angle is a grid point.
struct Detection {
  std::vector<double> angles_deg;  // ascending
  int k_hat = 0;
};

namespace detail {

inline void check_estimator_inputs(const BeamformedData& data, const PhaseMatrix& phases,
                                   const NlmsConfig& cfg) {
  cfg.validate();
  if (data.z.rows() == 0 || data.z.cols() == 0)
    throw std::invalid_argument("nlms: empty data matrix");
  if (phases.v.rows() != data.z.rows())
    throw std::invalid_argument("nlms: phase matrix rows != data rows");
  if (phases.v.cols() < 1)
    throw std::invalid_argument("nlms: phase matrix must have at least one column");
  if (cfg.grid.size() == 0) throw std::invalid_argument("nlms: empty grid");
}

}  // namespace detail

/// Batch filter bank. For each grid angle a filter across the data rows is
/// adapted over the snapshots against the reference output of the
/// phase-schedule steering vector; the spectrum is the final filter energy.
/// Angles are independent, so the grid can be chunked across threads with
/// results identical to the sequential loop.
inline Spectrum batch_spectrum(const BeamformedData& data, const PhaseMatrix& phases,
                               const NlmsConfig& cfg) {
  detail::check_estimator_inputs(data, phases, cfg);
  const Eigen::MatrixXcd& z = data.z;
  const Eigen::Index rows = z.rows();
  const Eigen::Index n_snap = z.cols();
  const auto n_grid = static_cast<Eigen::Index>(cfg.grid.size());

  const Eigen::MatrixXcd manifold = steering_matrix(
      cfg.grid, static_cast<int>(phases.v.cols()), cfg.spacing_wavelengths);
  const Eigen::MatrixXcd schedule = phases.v * manifold;  // rows x n_grid

  Eigen::VectorXd inv_norm(n_snap);
  for (Eigen::Index l = 0; l < n_snap; ++l)
    inv_norm[l] = cfg.mu / (z.col(l).norm() + cfg.epsilon_norm);

  Eigen::MatrixXcd filters = Eigen::MatrixXcd::Zero(rows, n_grid);

  const auto process_block = [&](Eigen::Index g0, Eigen::Index g1) {
    if (g0 >= g1) return;
    auto filter_blk = filters.middleCols(g0, g1 - g0);
    const auto sched_blk = schedule.middleCols(g0, g1 - g0);
    const Eigen::MatrixXcd reference = sched_blk.adjoint() * z;  // blk x n_snap
    Eigen::VectorXcd err(g1 - g0);
    for (Eigen::Index l = 0; l < n_snap; ++l) {
      err = reference.col(l) - filter_blk.adjoint() * z.col(l);
      filter_blk.noalias() += inv_norm[l] * z.col(l) * err.conjugate().transpose();
    }
  };

  unsigned n_threads = cfg.n_threads == 0 ? 1 : cfg.n_threads;
  if (n_threads <= 1) {
    process_block(0, n_grid);
  } else {
    const Eigen::Index n_blocks = std::min<Eigen::Index>(n_grid, n_threads);
    const Eigen::Index block = (n_grid + n_blocks - 1) / n_blocks;
    parallel_for(static_cast<std::size_t>(n_blocks), [&](std::size_t b) {
      const auto g0 = static_cast<Eigen::Index>(b) * block;
      process_block(g0, std::min(n_grid, g0 + block));
    }, static_cast<unsigned>(n_blocks));
  }

  Spectrum out;
  out.grid = cfg.grid;
  out.p = filters.colwise().squaredNorm().transpose().array();
  return out;
}

/// Streaming variant: one pass over the data rows, emitting the running
/// spectrum after every row so estimates are available before the campaign
/// completes. The per-snapshot reference accumulators persist across rows;
/// the scalar trackers restart on every row and their updates are normalized
/// by the column energy seen so far.
inline std::vector<Spectrum> sequential_spectrum(const BeamformedData& data,
                                                 const PhaseMatrix& phases,
                                                 const NlmsConfig& cfg) {
  detail::check_estimator_inputs(data, phases, cfg);
  const Eigen::MatrixXcd& z = data.z;
  const Eigen::Index rows = z.rows();
  const Eigen::Index n_snap = z.cols();
  const auto n_grid = static_cast<Eigen::Index>(cfg.grid.size());

  const Eigen::MatrixXcd manifold = steering_matrix(
      cfg.grid, static_cast<int>(phases.v.cols()), cfg.spacing_wavelengths);
  const Eigen::MatrixXcd schedule_conj = (phases.v * manifold).conjugate();  // rows x n_grid

  Eigen::MatrixXcd reference_acc = Eigen::MatrixXcd::Zero(n_grid, n_snap);
  Eigen::ArrayXd column_energy = Eigen::ArrayXd::Zero(n_snap);
  Eigen::ArrayXd power = Eigen::ArrayXd::Zero(n_grid);
  Eigen::VectorXcd tracker(n_grid);

  std::vector<Spectrum> out;
  out.reserve(static_cast<std::size_t>(rows));

  for (Eigen::Index n = 0; n < rows; ++n) {
    for (Eigen::Index l = 0; l < n_snap; ++l) column_energy[l] += std::norm(z(n, l));
    tracker.setZero();
    for (Eigen::Index l = 0; l < n_snap; ++l) {
      const std::complex<double> sample = z(n, l);
      reference_acc.col(l).noalias() += schedule_conj.row(n).transpose() * sample;
      const double step = cfg.mu / (column_energy[l] + cfg.epsilon_norm);
      // tracker update: p += step * conj(d - conj(p) * sample) * sample
      tracker = tracker * (1.0 - step * std::norm(sample)) +
                (step * sample) * reference_acc.col(l).conjugate();
    }
    power += tracker.array().abs2();
    Spectrum s;
    s.grid = cfg.grid;
    s.p = power;
    out.push_back(std::move(s));
  }
  return out;
}

/// Rescales so the maximum is exactly 1. An all-zero spectrum has no
/// detectable energy and is rejected.
inline Spectrum normalize_spectrum(const Spectrum& s) {
  const double peak = s.p.size() ? s.p.maxCoeff() : 0.0;
  if (!(peak > 0.0))
    throw std::runtime_error("normalize_spectrum: no detectable energy in spectrum");
  Spectrum out;
  out.grid = s.grid;
  out.p = s.p / peak;
  out.normalized = true;
  return out;
}

/// Local maxima of a normalized spectrum at or above the threshold. A run of
/// equal values counts as one peak at its center grid index; grid endpoints
/// qualify when they exceed their single neighbor.
inline Detection detect_peaks(const Spectrum& s, double threshold) {
  if (!s.normalized)
    throw std::invalid_argument("detect_peaks: spectrum must be normalized first");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("detect_peaks: threshold must lie in (0, 1)");
  Detection det;
  const Eigen::Index n = s.p.size();
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && s.p[j + 1] == s.p[i]) ++j;  // plateau [i, j]
    const bool left_ok = (i == 0) ? (j + 1 < n) : (s.p[i - 1] < s.p[i]);
    const bool right_ok = (j == n - 1) ? (i > 0) : (s.p[j + 1] < s.p[i]);
    if (left_ok && right_ok && s.p[i] >= threshold) {
      const Eigen::Index center = i + (j - i) / 2;
      det.angles_deg.push_back(s.grid[static_cast<std::size_t>(center)]);
    }
    i = j + 1;
  }
  det.k_hat = static_cast<int>(det.angles_deg.size());
  return det;
}

inline Detection detect_peaks(const Spectrum& s, const NlmsConfig& cfg) {
  return detect_peaks(s, cfg.peak_threshold);
}

}  // namespace risloc
