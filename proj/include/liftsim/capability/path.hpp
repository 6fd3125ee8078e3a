#pragma once

#include <vector>

namespace liftsim::capability {

// One state along a repetition's path through the capability plane.
struct PathPoint {
  double t = 0.0;         // s since the start of the repetition
  double delta = 0.0;     // m
  double velocity = 0.0;  // m/s
  double force = 0.0;     // N, athlete force on the load
  double g = 1.0;         // fatigue factor exp(-L) at this state
};

using CapabilityPath = std::vector<PathPoint>;

}  // namespace liftsim::capability
