#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "liftsim/fatigue/max_exertion.hpp"
#include "liftsim/fatigue/optimal_policy.hpp"
#include "liftsim/kinematics/segmentation.hpp"

namespace liftsim::simulation {

// 1RM predicted from an n-repetition maximum: w1 = 36 w / (37 - n).
inline double brzycki_1rm(double load, int n_reps) {
  detail::require(n_reps >= 1, "brzycki_1rm: repetition count must be >= 1");
  if (n_reps >= 37) throw InputError("brzycki_1rm: repetition count must be <= 36");
  detail::require(std::isfinite(load) && load > 0.0, "brzycki_1rm: load must be positive");
  return 36.0 * load / (37.0 - n_reps);
}

enum class Policy { max_exertion, minimal_fatigue };

struct SetOptions {
  Policy policy = Policy::max_exertion;
  int max_reps = 50;
  fatigue::IntegratorOptions integrator{};
  fatigue::PolicyOptions dp{};
};

struct RepResult {
  bool completed = false;
  double duration = 0.0;
  double entry_log_fatigue = 0.0;
  double exit_log_fatigue = 0.0;
  capability::CapabilityPath path;
};

struct SetResult {
  std::vector<RepResult> reps;

  int completed() const {
    return static_cast<int>(std::count_if(reps.begin(), reps.end(), [](const RepResult& r) { return r.completed; }));
  }
};

// Repetitions back to back from rest at the bottom of the range, fatigue
// carried over (pauses leave it unchanged), until one fails or max_reps
// complete. Under the minimal-fatigue policy a repetition the dynamic program
// cannot complete is attempted at maximal exertion.
inline SetResult simulate_set(const capability::CapabilityProfile& profile, const dynamics::ExerciseSetup& setup,
                              double time_constant, const SetOptions& opt = {}) {
  setup.validate();
  detail::require(opt.max_reps >= 1, "simulate_set: max_reps must be >= 1");
  fatigue::FatigueState state(time_constant);
  SetResult out;
  for (int k = 0; k < opt.max_reps; ++k) {
    RepResult rep;
    rep.entry_log_fatigue = state.log_fatigue();
    bool done = false;
    if (opt.policy == Policy::minimal_fatigue) {
      try {
        auto r = fatigue::optimal_rep_policy(profile, setup, state, opt.dp);
        rep.completed = true;
        rep.duration = r.duration;
        rep.exit_log_fatigue = r.terminal_log_fatigue;
        rep.path = std::move(r.path);
        done = true;
      } catch (const InfeasibleError&) {
      }
    }
    if (!done) {
      auto r = fatigue::max_exertion_rep(profile, setup, state, opt.integrator);
      rep.completed = r.completed;
      rep.duration = r.duration;
      rep.exit_log_fatigue = r.final_state.log_fatigue();
      rep.path = std::move(r.path);
    }
    state = fatigue::FatigueState(time_constant, rep.exit_log_fatigue);
    const bool completed = rep.completed;
    out.reps.push_back(std::move(rep));
    if (!completed) break;
  }
  return out;
}

inline int max_reps_at_load(const capability::CapabilityProfile& profile, const dynamics::ExerciseSetup& setup,
                            double time_constant, const SetOptions& opt = {}) {
  return simulate_set(profile, setup, time_constant, opt).completed();
}

// Whether a single fresh maximal repetition with load mass `mass` completes.
inline bool single_rep_completes(const capability::CapabilityProfile& profile, dynamics::ExerciseSetup setup,
                                 double time_constant, double mass, const fatigue::IntegratorOptions& integ = {}) {
  setup.mass = mass;
  return fatigue::max_exertion_rep(profile, setup, fatigue::FatigueState(time_constant), integ).completed;
}

struct OneRepMaxEstimate {
  double load = 0.0;        // kg, largest completing load found
  double failing_load = 0.0;  // kg, smallest failing load found; failing_load - load <= tol
  int evaluations = 0;
};

// Exponential bracketing then bisection on the load mass for the predicate
// "one maximal repetition completes".
inline OneRepMaxEstimate estimate_1rm(const capability::CapabilityProfile& profile,
                                      const dynamics::ExerciseSetup& setup_template, double time_constant,
                                      double tol = pounds_to_kg(0.5), const fatigue::IntegratorOptions& integ = {}) {
  detail::require(tol > 0.0, "estimate_1rm: tolerance must be positive");
  setup_template.validate();
  OneRepMaxEstimate est;
  auto completes = [&](double w) {
    ++est.evaluations;
    return single_rep_completes(profile, setup_template, time_constant, w, integ);
  };
  const double guess = std::max(1.0, capability::sample_profile(profile, 0.0, 0.0) / setup_template.gravity);
  double lo = 0.0, hi = 0.0;
  if (completes(guess)) {
    lo = guess;
    hi = 2.0 * guess;
    while (completes(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e7) throw NumericalError("estimate_1rm: no failing load below 1e7 kg");
    }
  } else {
    hi = guess;
    lo = 0.5 * guess;
    while (!completes(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-6) throw InfeasibleError("estimate_1rm: no load completes a repetition (zero capability)");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (completes(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  est.load = lo;
  est.failing_load = hi;
  return est;
}

struct RepComparison {
  double rms_elevation_error = 0.0;  // m
  double duration_error = 0.0;       // s, predicted - measured
};

struct MeasurementComparison {
  std::vector<RepComparison> reps;
  bool count_mismatch = false;
  int predicted_reps = 0;
  int measured_reps = 0;
};

// Predicted elevation at time tau after the repetition start, holding the
// final value past the end of the path.
inline double path_elevation_at(const capability::CapabilityPath& path, double tau) {
  if (tau <= path.front().t - path.front().t) return path.front().delta;
  const double t0 = path.front().t;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double ta = path[k - 1].t - t0, tb = path[k].t - t0;
    if (tau <= tb) {
      const double u = (tau - ta) / (tb - ta);
      return path[k - 1].delta + u * (path[k].delta - path[k - 1].delta);
    }
  }
  return path.back().delta;
}

// Compares predicted repetitions against measured concentric segments, rep
// by rep with starts aligned. The measured elevation is compared as is; each
// predicted repetition starts from zero elevation.
inline MeasurementComparison compare_to_measurement(const std::vector<capability::CapabilityPath>& predicted,
                                                    const kinematics::ElevationSeries& measured,
                                                    const std::vector<kinematics::RepetitionSegment>& segments) {
  detail::require(!predicted.empty(), "compare_to_measurement: no predicted repetitions");
  for (const auto& p : predicted) detail::require(p.size() >= 2, "compare_to_measurement: empty predicted path");
  MeasurementComparison out;
  out.predicted_reps = static_cast<int>(predicted.size());
  out.measured_reps = static_cast<int>(segments.size());
  out.count_mismatch = out.predicted_reps != out.measured_reps;
  const std::size_t n = std::min(predicted.size(), segments.size());
  for (std::size_t r = 0; r < n; ++r) {
    const auto& seg = segments[r];
    const auto& path = predicted[r];
    double se = 0.0;
    std::size_t count = 0;
    for (std::size_t k = seg.start_index; k <= seg.end_index; ++k) {
      const double tau = static_cast<double>(k - seg.start_index) * measured.dt();
      const double e = measured[k] - path_elevation_at(path, tau);
      se += e * e;
      ++count;
    }
    const double measured_duration = static_cast<double>(seg.end_index - seg.start_index) * measured.dt();
    const double predicted_duration = path.back().t - path.front().t;
    out.reps.push_back({std::sqrt(se / static_cast<double>(count)), predicted_duration - measured_duration});
  }
  return out;
}

inline MeasurementComparison compare_to_measurement(const std::vector<capability::CapabilityPath>& predicted,
                                                    const kinematics::ElevationSeries& measured,
                                                    const kinematics::SegmentationConfig& seg_cfg = {}) {
  detail::require(measured.size() >= 3, "compare_to_measurement: empty measurement");
  return compare_to_measurement(predicted, measured, kinematics::segment_concentric(measured, seg_cfg));
}

}  // namespace liftsim::simulation
