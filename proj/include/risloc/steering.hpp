#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "risloc/angles.hpp"

namespace risloc {

using cdouble = std::complex<double>;

/// Array response of a half-wavelength-style ULA to a unit plane wave.
/// Element m carries phase 2*pi*spacing*m*sin(theta), phase reference at
/// element 0. All entries are unit modulus, so ||a||^2 == n exactly.
struct SteeringVector {
  double angle_deg = 0.0;
  Eigen::VectorXcd elements;
};

inline SteeringVector steering_vector(double theta_deg, int n_elements,
                                      double spacing_wavelengths = 0.5) {
  if (n_elements < 1)
    throw std::invalid_argument("steering_vector: need at least one element");
  if (!std::isfinite(theta_deg))
    throw std::invalid_argument("steering_vector: angle must be finite");
  if (std::abs(theta_deg) > 90.0)
    throw std::invalid_argument("steering_vector: angle outside [-90, 90]");

  SteeringVector a;
  a.angle_deg = theta_deg;
  a.elements.resize(n_elements);
  const double phase_step = 2.0 * M_PI * spacing_wavelengths * std::sin(deg2rad(theta_deg));
  for (int m = 0; m < n_elements; ++m)
    a.elements[m] = std::polar(1.0, phase_step * static_cast<double>(m));
  return a;
}

/// Array manifold: column k is the steering vector of angles[k].
inline Eigen::MatrixXcd steering_matrix(const std::vector<double>& angles_deg,
                                        int n_elements,
                                        double spacing_wavelengths = 0.5) {
  if (angles_deg.empty())
    throw std::invalid_argument("steering_matrix: empty angle list");
  Eigen::MatrixXcd manifold(n_elements, static_cast<Eigen::Index>(angles_deg.size()));
  for (std::size_t k = 0; k < angles_deg.size(); ++k)
    manifold.col(static_cast<Eigen::Index>(k)) =
        steering_vector(angles_deg[k], n_elements, spacing_wavelengths).elements;
  return manifold;
}

inline Eigen::MatrixXcd steering_matrix(const AngleGrid& grid, int n_elements,
                                        double spacing_wavelengths = 0.5) {
  return steering_matrix(grid.values, n_elements, spacing_wavelengths);
}

}  // namespace risloc
