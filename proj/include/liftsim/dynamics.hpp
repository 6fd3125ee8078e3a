#pragma once

#include <cmath>

#include "liftsim/errors.hpp"
#include "liftsim/kinematics/series.hpp"

namespace liftsim::dynamics {

// Resistance mechanism: a load m (positive up) tied over a pulley to a
// counterweight m0 (positive down), with a linear damper c on the load side.
struct ExerciseSetup {
  double mass = 100.0;         // kg
  double countermass = 0.0;    // kg
  double viscosity = 0.0;      // N s / m
  double range_of_motion = 0.5;  // m
  double gravity = kStandardGravity;

  void validate() const {
    detail::require(std::isfinite(mass) && mass > 0.0, "ExerciseSetup: mass must be positive");
    detail::require(std::isfinite(countermass) && countermass >= 0.0, "ExerciseSetup: countermass must be >= 0");
    detail::require(std::isfinite(viscosity) && viscosity >= 0.0, "ExerciseSetup: viscosity must be >= 0");
    detail::require(std::isfinite(range_of_motion) && range_of_motion > 0.0,
                    "ExerciseSetup: range of motion must be positive");
    detail::require(std::isfinite(gravity) && gravity > 0.0, "ExerciseSetup: gravity must be positive");
  }

  // Force needed to hold the load still.
  double static_force() const { return (mass - countermass) * gravity; }

  bool operator==(const ExerciseSetup&) const = default;
};

// Athlete force on the load for a given load velocity and acceleration:
//   F = (m + m0) a + (m - m0) g + c v
inline double effective_force(const ExerciseSetup& s, double velocity, double acceleration) {
  return (s.mass + s.countermass) * acceleration + (s.mass - s.countermass) * s.gravity + s.viscosity * velocity;
}

inline double load_acceleration(const ExerciseSetup& s, double force, double velocity) {
  return (force - (s.mass - s.countermass) * s.gravity - s.viscosity * velocity) / (s.mass + s.countermass);
}

}  // namespace liftsim::dynamics
