#pragma once

#include <cmath>
#include <limits>

#include "liftsim/errors.hpp"

namespace liftsim::fatigue {

// Fatigue modulation g = exp(-L) in (0, 1], L in nats, with time constant T_F.
class FatigueState {
 public:
  explicit FatigueState(double time_constant, double log_fatigue = 0.0)
      : time_constant_(time_constant), log_fatigue_(log_fatigue) {
    detail::require(time_constant > 0.0, "FatigueState: T_F must be positive");
    detail::require(std::isfinite(log_fatigue) && log_fatigue >= 0.0, "FatigueState: L must be finite and >= 0");
  }

  double time_constant() const { return time_constant_; }
  double log_fatigue() const { return log_fatigue_; }
  double g() const { return std::exp(-log_fatigue_); }

 private:
  double time_constant_;
  double log_fatigue_;
};

// Relative exertion F / Fhat.
inline double rho(double force, double capability) {
  detail::require(capability > 0.0, "rho: capability must be positive");
  detail::require(force >= 0.0, "rho: force must be non-negative");
  if (force > capability) throw InputError("rho: force exceeds capability");
  return force / capability;
}

// Exact update of dg/dt = -(1/T_F) g rho over a step with constant rho:
// L <- L + rho dt / T_F.
inline FatigueState fatigue_step(const FatigueState& s, double rho_value, double dt) {
  detail::require(rho_value >= 0.0 && rho_value <= 1.0, "fatigue_step: rho must be in [0,1]");
  detail::require(dt > 0.0, "fatigue_step: dt must be positive");
  if (std::isinf(s.time_constant())) return s;
  return FatigueState(s.time_constant(), s.log_fatigue() + rho_value * dt / s.time_constant());
}

}  // namespace liftsim::fatigue
