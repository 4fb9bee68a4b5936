#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace risloc {

inline double deg2rad(double deg) { return deg * M_PI / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / M_PI; }

/// Uniform scan grid in degrees, endpoints included when they land on the
/// step. All search and reporting happens on these points.
struct AngleGrid {
  double start_deg = -90.0;
  double stop_deg = 90.0;
  double step_deg = 0.5;
  std::vector<double> values;

  AngleGrid() { rebuild(); }

  AngleGrid(double start, double stop, double step)
      : start_deg(start), stop_deg(stop), step_deg(step) {
    rebuild();
  }

  void rebuild() {
    if (!(start_deg < stop_deg))
      throw std::invalid_argument("AngleGrid: start must be < stop");
    if (!(step_deg > 0.0))
      throw std::invalid_argument("AngleGrid: step must be > 0");
    const double span = stop_deg - start_deg;
    const auto n = static_cast<std::size_t>(std::floor(span / step_deg * (1.0 + 1e-12))) + 1;
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = start_deg + static_cast<double>(i) * step_deg;
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  /// Index of the grid point closest to angle_deg.
  std::size_t nearest_index(double angle_deg) const {
    double best = std::abs(values[0] - angle_deg);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double d = std::abs(values[i] - angle_deg);
      if (d < best) {
        best = d;
        arg = i;
      }
    }
    return arg;
  }
};

}  // namespace risloc
