#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "risloc/angles.hpp"
#include "risloc/simulate.hpp"
#include "risloc/steering.hpp"

namespace risloc {

/// Distortionless weights for a fixed look direction: w = a / ||a||^2, so
/// w^H a(look) = 1 exactly and everything else is attenuated by the array
/// pattern.
struct BeamWeights {
  Eigen::VectorXcd w;
  double look_angle_deg = 0.0;
};

inline BeamWeights compute_weights(double look_angle_deg, int n_antennas,
                                   double spacing_wavelengths = 0.5) {
  const auto a = steering_vector(look_angle_deg, n_antennas, spacing_wavelengths);
  BeamWeights bw;
  bw.look_angle_deg = look_angle_deg;
  bw.w = a.elements / a.elements.squaredNorm();
  return bw;
}

/// |w^H a(theta)| sampled over the grid. Unit response at the look angle.
inline Eigen::ArrayXd beampattern(const BeamWeights& bw, const AngleGrid& grid,
                                  double spacing_wavelengths = 0.5) {
  const int n = static_cast<int>(bw.w.size());
  Eigen::ArrayXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto a = steering_vector(grid[i], n, spacing_wavelengths);
    out[static_cast<Eigen::Index>(i)] = std::abs(bw.w.dot(a.elements));
  }
  return out;
}

/// Campaign data after spatial combining: row n is w^H Y_n.
struct BeamformedData {
  Eigen::MatrixXcd z;  // n_epoch x snapshots

  void save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,snapshot,re,im\n";
    char buf[96];
    for (Eigen::Index n = 0; n < z.rows(); ++n)
      for (Eigen::Index l = 0; l < z.cols(); ++l) {
        std::snprintf(buf, sizeof(buf), "%lld,%lld,%.6g,%.6g\n",
                      static_cast<long long>(n), static_cast<long long>(l),
                      z(n, l).real(), z(n, l).imag());
        out << buf;
      }
  }
};

inline BeamformedData beamform(const DataCube& cube, const BeamWeights& bw) {
  if (cube.epochs.empty()) throw std::invalid_argument("beamform: empty cube");
  if (cube.n_pr() != bw.w.size())
    throw std::invalid_argument("beamform: weight length != antenna count");
  BeamformedData out;
  out.z.resize(cube.n_epoch(), cube.snapshots());
  for (Eigen::Index n = 0; n < cube.n_epoch(); ++n) {
    if (cube.epochs[n].y.rows() != bw.w.size() ||
        cube.epochs[n].y.cols() != out.z.cols())
      throw std::invalid_argument("beamform: ragged cube");
    out.z.row(n) = bw.w.adjoint() * cube.epochs[n].y;
  }
  return out;
}

/// The campaign's full data matrix: epoch blocks stacked vertically, so row
/// (n * antennas + i) holds antenna i of epoch n. This is the estimator
/// input for the no-surface reference pipeline, which reads directions
/// across the physical array instead of across epochs.
inline BeamformedData stack_epochs(const DataCube& cube) {
  if (cube.epochs.empty()) throw std::invalid_argument("stack_epochs: empty cube");
  BeamformedData out;
  out.z.resize(cube.n_epoch() * cube.n_pr(), cube.snapshots());
  for (Eigen::Index n = 0; n < cube.n_epoch(); ++n)
    out.z.middleRows(n * cube.n_pr(), cube.n_pr()) = cube.epochs[n].y;
  return out;
}

}  // namespace risloc
