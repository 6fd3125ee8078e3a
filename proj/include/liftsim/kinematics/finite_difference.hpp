#pragma once

#include <span>
#include <vector>

#include "liftsim/kinematics/series.hpp"

namespace liftsim::kinematics {

// Three-point velocity. v_0 = 0 is the rest initial condition; the final
// sample uses a backward difference.
inline std::vector<double> fd_velocity(const ElevationSeries& series) {
  const std::size_t n = series.size();
  const double dt = series.dt();
  std::vector<double> v(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) v[k] = (series[k + 1] - series[k - 1]) / (2.0 * dt);
  v[n - 1] = (series[n - 1] - series[n - 2]) / dt;
  return v;
}

// Acceleration from a velocity series: forward difference at k = 0, central
// differences inside, backward difference at the end.
inline std::vector<double> fd_acceleration(std::span<const double> v, double dt) {
  detail::require(v.size() >= 3, "fd_acceleration: need at least 3 samples");
  detail::require(dt > 0.0, "fd_acceleration: dt must be positive");
  const std::size_t n = v.size();
  std::vector<double> a(n);
  a[0] = (v[1] - v[0]) / dt;
  for (std::size_t k = 1; k + 1 < n; ++k) a[k] = (v[k + 1] - v[k - 1]) / (2.0 * dt);
  a[n - 1] = (v[n - 1] - v[n - 2]) / dt;
  return a;
}

}  // namespace liftsim::kinematics
