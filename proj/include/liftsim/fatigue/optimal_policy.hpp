#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "liftsim/capability/path.hpp"
#include "liftsim/capability/profile.hpp"
#include "liftsim/dynamics.hpp"
#include "liftsim/fatigue/fatigue.hpp"

namespace liftsim::fatigue {

struct PolicyOptions {
  double delta_step = 0.01;  // m, nominal slice spacing; adjusted to divide the range evenly
  int n_velocities = 64;     // velocity levels over [0, v_max]
};

// Minimal accumulated fatigue over position slices delta_n = n * delta_step
// and velocity levels v_j. L is +inf at unreachable nodes; back[n][j] is the
// velocity index at slice n-1 on the optimal way in (-1 if none).
struct PolicyGrid {
  int n_slices = 0;  // slices 0..n_slices
  double delta_step = 0.0;
  std::vector<double> velocities;
  std::vector<double> L;
  std::vector<int> back;

  int n_velocities() const { return static_cast<int>(velocities.size()); }
  std::size_t at(int n, int j) const { return static_cast<std::size_t>(n) * velocities.size() + j; }
  double log_fatigue(int n, int j) const { return L[at(n, j)]; }
};

// Force and fatigue increment for moving from (delta_n, v_from) to
// (delta_n + step, v_to); nullopt when the move is outside the reachable
// region (needs negative force, more than the fatigued capability, or takes
// infinite time).
struct Transition {
  double force;
  double capability;
  double cost;
};

inline std::optional<Transition> policy_transition(const capability::CapabilityProfile& profile,
                                                   const dynamics::ExerciseSetup& setup, double time_constant,
                                                   double delta_n, double step, double v_from, double v_to,
                                                   double L_from) {
  const double vsum = v_from + v_to;
  if (!(vsum > 0.0) || v_to < 0.0) return std::nullopt;
  const double a = (v_to * v_to - v_from * v_from) / (2.0 * step);
  const double force = dynamics::effective_force(setup, v_from, a);
  const double cap = capability::sample_profile_clamped(profile, delta_n, v_from);
  if (!(cap > 0.0) || force < 0.0 || force > cap * std::exp(-L_from)) return std::nullopt;
  const double cost = std::isinf(time_constant) ? 0.0 : step / (time_constant * vsum / 2.0) * (force / cap);
  return Transition{force, cap, cost};
}

inline PolicyGrid solve_policy_grid(const capability::CapabilityProfile& profile,
                                    const dynamics::ExerciseSetup& setup, const FatigueState& entry,
                                    const PolicyOptions& opt = {}, std::optional<int> slices_override = {}) {
  setup.validate();
  detail::require(opt.delta_step > 0.0, "optimal_rep_policy: delta step must be positive");
  detail::require(opt.n_velocities >= 2, "optimal_rep_policy: need at least 2 velocity levels");
  PolicyGrid grid;
  const int full = std::max(1, static_cast<int>(std::lround(setup.range_of_motion / opt.delta_step)));
  grid.delta_step = setup.range_of_motion / full;
  grid.n_slices = slices_override ? *slices_override : full;
  detail::require(grid.n_slices >= 1 && grid.n_slices <= full, "optimal_rep_policy: invalid slice count");
  const int nv = opt.n_velocities;
  grid.velocities.resize(static_cast<std::size_t>(nv));
  for (int j = 0; j < nv; ++j) grid.velocities[static_cast<std::size_t>(j)] = profile.v_max() * j / (nv - 1);
  constexpr double inf = std::numeric_limits<double>::infinity();
  grid.L.assign(static_cast<std::size_t>(grid.n_slices + 1) * nv, inf);
  grid.back.assign(grid.L.size(), -1);
  grid.L[grid.at(0, 0)] = entry.log_fatigue();

  for (int n = 0; n < grid.n_slices; ++n) {
    const double delta_n = n * grid.delta_step;
    for (int jf = 0; jf < nv; ++jf) {
      const double L_from = grid.L[grid.at(n, jf)];
      if (std::isinf(L_from)) continue;
      for (int jt = 0; jt < nv; ++jt) {
        const auto tr = policy_transition(profile, setup, entry.time_constant(), delta_n, grid.delta_step,
                                          grid.velocities[static_cast<std::size_t>(jf)],
                                          grid.velocities[static_cast<std::size_t>(jt)], L_from);
        if (!tr) continue;
        const double cand = L_from + tr->cost;
        double& best = grid.L[grid.at(n + 1, jt)];
        if (cand < best) {
          best = cand;
          grid.back[grid.at(n + 1, jt)] = jf;
        }
      }
    }
  }
  return grid;
}

struct PolicyResult {
  capability::CapabilityPath path;
  double terminal_log_fatigue = 0.0;
  double duration = 0.0;
};

// Minimal-fatigue repetition: the dynamic program over position slices,
// finished at the terminal velocity with least accumulated fatigue.
inline PolicyResult optimal_rep_policy(const capability::CapabilityProfile& profile,
                                       const dynamics::ExerciseSetup& setup, const FatigueState& entry,
                                       const PolicyOptions& opt = {}) {
  const PolicyGrid grid = solve_policy_grid(profile, setup, entry, opt);
  const int N = grid.n_slices;
  const int nv = grid.n_velocities();
  int best_j = -1;
  double best_L = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nv; ++j) {
    if (grid.log_fatigue(N, j) < best_L) {
      best_L = grid.log_fatigue(N, j);
      best_j = j;
    }
  }
  if (best_j < 0) throw InfeasibleError("optimal_rep_policy: no feasible path reaches the top of the range");

  std::vector<int> js(static_cast<std::size_t>(N) + 1);
  js[static_cast<std::size_t>(N)] = best_j;
  for (int n = N; n > 0; --n) js[static_cast<std::size_t>(n) - 1] = grid.back[grid.at(n, js[static_cast<std::size_t>(n)])];

  PolicyResult out;
  out.terminal_log_fatigue = best_L;
  double t = 0.0;
  double last_force = 0.0;
  for (int n = 0; n <= N; ++n) {
    const int j = js[static_cast<std::size_t>(n)];
    const double v = grid.velocities[static_cast<std::size_t>(j)];
    const double L = grid.log_fatigue(n, j);
    double force = last_force;
    if (n < N) {
      const double v_next = grid.velocities[static_cast<std::size_t>(js[static_cast<std::size_t>(n) + 1])];
      const auto tr =
          policy_transition(profile, setup, entry.time_constant(), n * grid.delta_step, grid.delta_step, v, v_next, L);
      force = tr->force;
      last_force = force;
    }
    out.path.push_back({t, n * grid.delta_step, v, force, std::exp(-L)});
    if (n < N) {
      const double v_next = grid.velocities[static_cast<std::size_t>(js[static_cast<std::size_t>(n) + 1])];
      t += grid.delta_step / ((v + v_next) / 2.0);
    }
  }
  out.duration = t;
  return out;
}

}  // namespace liftsim::fatigue
