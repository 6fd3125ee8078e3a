#pragma once

#include <optional>

#include "liftsim/capability/path.hpp"
#include "liftsim/capability/profile.hpp"
#include "liftsim/dynamics.hpp"
#include "liftsim/fatigue/fatigue.hpp"

namespace liftsim::fatigue {

struct RepOutcome {
  bool completed = false;
  double duration = 0.0;  // s; time to reach the top, or to the stall
  double failed_at = 0.0; // m; elevation of the stall when !completed
  capability::CapabilityPath path;
  FatigueState final_state{1.0};
};

struct IntegratorOptions {
  double dt = 0.005;         // s
  double max_duration = 60;  // s; a repetition still short of the top by then has failed
};

// Athlete exerts F = Fhat(delta, v) * g throughout, so rho = 1. Integrated
// with semi-implicit Euler (velocity first). The repetition completes when the
// load reaches the top of the range (crossing time interpolated within the
// step) and fails when the load stops with non-positive acceleration.
// Velocities beyond the profile's v_max read the capability at v_max.
inline RepOutcome max_exertion_rep(const capability::CapabilityProfile& profile,
                                   const dynamics::ExerciseSetup& setup, const FatigueState& entry,
                                   const IntegratorOptions& opt = {}) {
  setup.validate();
  detail::require(opt.dt > 0.0 && opt.max_duration > 0.0, "max_exertion_rep: invalid integrator options");
  const double top = setup.range_of_motion;
  const double tf = entry.time_constant();
  const double L0 = entry.log_fatigue();

  RepOutcome out;
  double t = 0.0, delta = 0.0, v = 0.0;
  auto fatigue_at = [&](double time) { return std::isinf(tf) ? L0 : L0 + time / tf; };
  auto force_at = [&](double d, double vel, double time) {
    return capability::sample_profile_clamped(profile, std::min(d, profile.delta_max()), vel) *
           std::exp(-fatigue_at(time));
  };

  while (true) {
    const double L = fatigue_at(t);
    const double force = force_at(delta, v, t);
    out.path.push_back({t, delta, v, force, std::exp(-L)});
    const double a = dynamics::load_acceleration(setup, force, v);
    if (v <= 0.0 && a <= 0.0) {
      out.completed = false;
      out.failed_at = delta;
      out.duration = t;
      out.final_state = FatigueState(tf, L);
      return out;
    }
    if (t >= opt.max_duration) {
      out.completed = false;
      out.failed_at = delta;
      out.duration = t;
      out.final_state = FatigueState(tf, L);
      return out;
    }
    double v_next = v + a * opt.dt;
    if (v_next <= 0.0) {
      // The load stalls within this step.
      v_next = 0.0;
      const double t_next = t + opt.dt;
      const double L_next = fatigue_at(t_next);
      out.path.push_back({t_next, delta, 0.0, force_at(delta, 0.0, t_next), std::exp(-L_next)});
      out.completed = false;
      out.failed_at = delta;
      out.duration = t_next;
      out.final_state = FatigueState(tf, L_next);
      return out;
    }
    const double delta_next = delta + v_next * opt.dt;
    if (delta_next >= top) {
      const double frac = (top - delta) / (delta_next - delta);
      const double t_top = t + frac * opt.dt;
      const double L_top = fatigue_at(t_top);
      out.path.push_back({t_top, top, v_next, force_at(top, v_next, t_top), std::exp(-L_top)});
      out.completed = true;
      out.duration = t_top;
      out.final_state = FatigueState(tf, L_top);
      return out;
    }
    t += opt.dt;
    delta = delta_next;
    v = v_next;
  }
}

}  // namespace liftsim::fatigue
