#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <stdexcept>

#include "risloc/rng.hpp"
#include "risloc/steering.hpp"

namespace risloc {

/// Per-epoch phase configuration of the reflecting surface. Row n holds the
/// unit-modulus reflection coefficients applied during epoch n.
struct PhaseMatrix {
  Eigen::MatrixXcd v;  // n_epoch x m

  Eigen::Index n_epoch() const { return v.rows(); }
  Eigen::Index m() const { return v.cols(); }

  /// Trivial all-ones configuration (zero phases). Also usable with m = 0
  /// when the surface is absent.
  static PhaseMatrix ones(Eigen::Index n_epoch, Eigen::Index m) {
    PhaseMatrix p;
    p.v = Eigen::MatrixXcd::Ones(n_epoch, m);
    return p;
  }

  /// Vertical stack of identity blocks, one per epoch. This is the schedule
  /// fed to the estimators by the no-surface reference pipeline: the stacked
  /// data rows are (epoch, antenna) pairs and the product with a steering
  /// vector replicates the physical array manifold across epochs.
  static PhaseMatrix stacked_identity(Eigen::Index n_blocks, Eigen::Index n) {
    PhaseMatrix p;
    p.v.resize(n_blocks * n, n);
    for (Eigen::Index b = 0; b < n_blocks; ++b)
      p.v.middleRows(b * n, n) = Eigen::MatrixXcd::Identity(n, n);
    return p;
  }

  double max_modulus_error() const {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      for (Eigen::Index i = 0; i < v.rows(); ++i)
        worst = std::max(worst, std::abs(std::abs(v(i, j)) - 1.0));
    return worst;
  }

  /// One row per epoch, entries as phases in radians.
  void save_phase_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", std::arg(v(i, j)));
        out << (j ? "," : "") << buf;
      }
      out << "\n";
    }
  }
};

/// Projector onto the orthogonal complement of a: I - a a^H / ||a||^2.
/// Hermitian and idempotent; annihilates a by construction.
inline Eigen::MatrixXcd orthogonal_projector(const SteeringVector& a) {
  const double n2 = a.elements.squaredNorm();
  if (n2 <= 0.0) throw std::invalid_argument("orthogonal_projector: zero vector");
  const Eigen::Index m = a.elements.size();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(m, m);
  p.noalias() -= (a.elements * a.elements.adjoint()) / n2;
  return p;
}

/// Draws a standard circular Gaussian mixing matrix, pushes its columns
/// through the projector and keeps only the phases, yielding a feasible
/// unit-modulus configuration per epoch. arg(0) is treated as 0 so the map
/// is total.
///
/// The extracted row is the conjugate of the projected column's phases: the
/// projector enforces a^H w = 0, and conjugation turns the phase-only
/// residue of that null into a small plain product v^T a, which is the
/// quantity the reflection physics applies. Without it the suppression
/// lands on the mirrored direction instead.
inline PhaseMatrix phase_extract(const Eigen::MatrixXcd& projector,
                                 Eigen::Index n_epoch, std::uint64_t seed) {
  if (projector.rows() != projector.cols())
    throw std::invalid_argument("phase_extract: projector must be square");
  const Eigen::Index m = projector.rows();
  Rng rng(mix_seed(seed, 0x72697376ull));
  Eigen::MatrixXcd mixing(m, n_epoch);
  for (Eigen::Index j = 0; j < n_epoch; ++j)
    for (Eigen::Index i = 0; i < m; ++i) mixing(i, j) = rng.cgaussian(1.0);
  Eigen::MatrixXcd projected = projector * mixing;  // m x n_epoch
  PhaseMatrix out;
  out.v.resize(n_epoch, m);
  for (Eigen::Index j = 0; j < n_epoch; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::complex<double> w = projected(i, j);
      out.v(j, i) = (w == std::complex<double>(0.0, 0.0))
                        ? std::complex<double>(1.0, 0.0)
                        : std::polar(1.0, -std::arg(w));
    }
  return out;
}

/// Full surface configuration: project away the static transmitter
/// direction, then extract feasible phases. The result depends on geometry
/// and the seed only, never on the transmitted signal.
inline PhaseMatrix build_ris_matrix(double angle_ap_ris_deg, int m, int n_epoch,
                                    std::uint64_t seed,
                                    double spacing_wavelengths = 0.5) {
  if (m < 2)
    throw std::invalid_argument(
        "build_ris_matrix: need at least 2 elements (projector is degenerate)");
  if (n_epoch < 1) throw std::invalid_argument("build_ris_matrix: need at least one epoch");
  const auto a = steering_vector(angle_ap_ris_deg, m, spacing_wavelengths);
  return phase_extract(orthogonal_projector(a), n_epoch, seed);
}

}  // namespace risloc
