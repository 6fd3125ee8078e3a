// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "liftsim/capability/interpolation.hpp"
#include "liftsim/capability/monotone.hpp"
#include "liftsim/capability/reconstruction.hpp"
#include "liftsim/fatigue/max_exertion.hpp"
#include "liftsim/fatigue/optimal_policy.hpp"
#include "liftsim/kinematics/smoothing_spline.hpp"
#include "liftsim/simulation.hpp"
#include "liftsim/vision/affine_tracker.hpp"
#include "liftsim/vision/interest_points.hpp"
#include "liftsim/vision/robust_motion.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace liftsim;
using capability::CapabilityProfile;
using dynamics::ExerciseSetup;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& name, const std::string& detail, double seconds) {
  std::printf("[%s] %d %s: %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. brzycki_1rm(275 lb, 12) = 396.0 lb within 0.05.
void brzycki() {
  const auto t0 = std::chrono::steady_clock::now();
  const double w = simulation::brzycki_1rm(275.0, 12);
  report(1, std::abs(w - 396.0) <= 0.05, "Brzycki exactness", fmt("w1 = %.6f lb, |w1 - 396.0| <= 0.05", w), since(t0));
}

// 2. A synthetic profile scaled so that exactly 12 reps complete at 275 lb;
// the simulated 1RM must lie within 7 % of the Brzycki estimate.
void one_rep_max_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const double load = pounds_to_kg(275.0);
  const double tf = 50.0;
  const ExerciseSetup setup{load, 0, 0, 0.5};
  auto reps_at = [&](double scale) {
    return simulation::max_reps_at_load(liftsim::testing::hill_profile(scale), setup, tf);
  };
  // Max reps is non-decreasing in the scale; bisect to the lowest scale that
  // completes 12.
  double lo = setup.static_force(), hi = 2.0 * setup.static_force();
  while (reps_at(hi) < 12) hi *= 1.5;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (reps_at(mid) >= 12 ? hi : lo) = mid;
  }
  const double scale = hi;
  const int n = reps_at(scale);
  const auto est = simulation::estimate_1rm(liftsim::testing::hill_profile(scale), setup, tf);
  const double w1 = kg_to_pounds(est.load);
  const double ref = simulation::brzycki_1rm(275.0, 12);
  const double rel = std::abs(w1 - ref) / ref;
  report(2, n == 12 && rel <= 0.07, "1RM consistency",
         fmt("T_F = %.0f s, reps(275 lb) = %d, simulated 1RM = %.1f lb vs Brzycki %.1f lb, rel diff %.2f%% <= 7%%", tf,
             n, w1, ref, 100 * rel),
         since(t0));
}

// 3. Failure rep simulated from a known profile, reconstructed up to scale,
// compared at every grid node the path visits.
void reconstruction_roundtrip() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExerciseSetup setup{60, 0, 0, 0.5};
  const auto truth = liftsim::testing::hill_profile(1.6 * setup.static_force());
  const double tf = 25.0, entry_L = 0.35;
  const auto rep = fatigue::max_exertion_rep(truth, setup, fatigue::FatigueState(tf, entry_L));
  if (rep.completed) {
    report(3, false, "Reconstruction roundtrip", "constructed repetition did not fail", since(t0));
    return;
  }
  // Entry fatigue is unknown to the reconstruction; it only sets the scale.
  const capability::GridGeometry grid{truth.nd(), truth.nv(), truth.delta_max(), truth.v_max()};
  const auto r = capability::reconstruct_from_failure_rep(rep.path, grid, tf, 0.0);
  double ab = 0.0, bb = 0.0;
  for (const auto& n : r.nodes) {
    ab += truth.at(n.delta_index, n.v_index) * n.value;
    bb += n.value * n.value;
  }
  const double s = ab / bb;
  double worst = 0.0;
  for (const auto& n : r.nodes) {
    const double t = truth.at(n.delta_index, n.v_index);
    worst = std::max(worst, std::abs(s * n.value - t) / t);
  }
  report(3, !r.nodes.empty() && worst <= 0.02, "Reconstruction roundtrip",
         fmt("%zu path nodes, max relative error %.3f%% <= 2%% (scale %.4f, exp(L0) = %.4f)", r.nodes.size(),
             100 * worst, s, std::exp(-entry_L)),
         since(t0));
}

// 4. Minimal-fatigue dynamic program against exhaustive enumeration.
void dp_vs_enumeration() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> small(2, 5);
  int mismatches = 0, feasible = 0;
  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    liftsim::testing::DpInstance in;
    in.setup = ExerciseSetup{20 + 60 * u(rng), 15 * u(rng), 40 * u(rng), 0.4};
    const double stat = in.setup.static_force();
    const int nd = small(rng), nv = small(rng);
    std::vector<double> s(static_cast<std::size_t>(nd) * nv);
    for (int i = 0; i < nd; ++i) {
      double f = stat * (1.2 + 1.3 * u(rng));
      for (int j = 0; j < nv; ++j) {
        s[static_cast<std::size_t>(i) * nv + j] = f;
        f *= 0.75 + 0.2 * u(rng);
      }
    }
    in.profile = CapabilityProfile(nd, nv, 0.4, 1.0, s);
    in.time_constant = 1 + 9 * u(rng);
    in.entry_L = 0.3 * u(rng);
    in.n_slices = small(rng);
    in.n_velocities = small(rng);
    const double oracle = liftsim::testing::enumerate_min_fatigue(in, in.n_slices);
    const fatigue::FatigueState entry(in.time_constant, in.entry_L);
    const fatigue::PolicyOptions opt{in.setup.range_of_motion / in.n_slices, in.n_velocities};
    try {
      const auto r = fatigue::optimal_rep_policy(in.profile, in.setup, entry, opt);
      ++feasible;
      const double err = std::abs(r.terminal_log_fatigue - oracle);
      if (!(err <= 1e-9)) ++mismatches;
      worst = std::max(worst, std::isfinite(err) ? err : std::numeric_limits<double>::infinity());
    } catch (const InfeasibleError&) {
      if (std::isfinite(oracle)) ++mismatches;
    }
  }
  report(4, mismatches == 0, "DP vs brute force",
         fmt("100 instances (%d feasible), %d mismatches, max |L_dp - L_enum| = %.2e <= 1e-9", feasible, mismatches,
             worst),
         since(t0));
}

// 5. Full tracking pipeline on a textured square moving up to 4 px/frame,
// plus an injected runaway track at 50 px/frame.
void tracking() {
  const auto t0 = std::chrono::steady_clock::now();
  liftsim::testing::TexturedSquare sq;
  sq.width = 200;
  sq.height = 160;
  sq.cx = 70;
  sq.cy = 40;
  const int n = 100;
  // Vertical steps peak at amp * sin(pi / 50); with the horizontal drift the
  // largest step is just under 4 px/frame.
  const double amp = 3.95 / std::sin(M_PI / 50.0);
  auto truth = [&](int k) {
    return std::pair{0.37 * k + 0.5 * std::sin(0.2 * k), amp * (1 - std::cos(2 * M_PI * k / 50.0)) / 2.0};
  };
  double peak_step = 0.0;
  std::vector<vision::GrayFrame> frames;
  for (int k = 0; k < n; ++k) {
    const auto [x, y] = truth(k);
    frames.push_back(sq.frame(x, y));
    if (k > 0) peak_step = std::max(peak_step, std::hypot(x - truth(k - 1).first, y - truth(k - 1).second));
  }
  const vision::TrackerConfig cfg;
  const auto points = vision::detect_interest_points(frames.front(), cfg);
  const std::vector<vision::Point2> roi{{sq.cx - 22, sq.cy - 22}, {sq.cx + 22, sq.cy - 22},
                                        {sq.cx + 22, sq.cy + 22}, {sq.cx - 22, sq.cy + 22}};
  const auto seeds = vision::seed_features(points, roi);
  auto tracks = vision::track_sequence(frames, seeds, cfg);
  const auto clean = vision::robust_displacement(tracks, cfg);
  vision::FeatureTrack runaway;
  runaway.window_size = 15;
  for (int k = 0; k < n; ++k) runaway.positions.push_back({sq.cx, sq.cy + 50.0 * k});
  tracks.push_back(runaway);
  const auto fused = vision::robust_displacement(tracks, cfg);

  double per_frame = 0.0, cumulative = 0.0;
  bool rejected = true;
  for (int k = 0; k < n; ++k) {
    const auto [x, y] = truth(k);
    cumulative = std::max(cumulative, std::hypot(fused[k].dx - x, fused[k].dy - (y)));
    if (k > 0) {
      const auto [px, py] = truth(k - 1);
      per_frame = std::max(per_frame, std::hypot((fused[k].dx - fused[k - 1].dx) - (x - px),
                                                 (fused[k].dy - fused[k - 1].dy) - (y - py)));
    }
    rejected = rejected && fused[k].dx == clean[k].dx && fused[k].dy == clean[k].dy;
  }
  report(5, per_frame <= 0.25 && cumulative <= 1.0 && rejected, "Tracking accuracy",
         fmt("%zu tracks, peak motion %.2f px/frame, max per-frame error %.3f px <= 0.25, max cumulative error "
             "%.3f px <= 1, runaway track %s",
             seeds.size(), peak_step, per_frame, cumulative, rejected ? "fully rejected" : "LEAKED"),
         since(t0));
}

// 6. Spline derivatives of delta(t) = 1.25 t^2 sampled at 25 Hz over 4 s,
// omega = 0.99, checked at every sample.
void derivative_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const double dt = 0.04;
  const int n = 101;
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = 1.25 * (k * dt) * (k * dt);
  const kinematics::ElevationSeries s(dt, v);
  const auto kin = kinematics::spline_kinematics(s, 0.99);
  double ev = 0.0, ea = 0.0, ev_in = 0.0, ea_in = 0.0, vmax = 0.0;
  int worst_a = 0;
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    const double dv = std::abs(kin.velocity[k] - 2.5 * t), da = std::abs(kin.acceleration[k] - 2.5);
    ev = std::max(ev, dv);
    if (da > ea) {
      ea = da;
      worst_a = k;
    }
    if (t <= 2.0) {
      ev_in = std::max(ev_in, dv);
      ea_in = std::max(ea_in, da);
    }
    vmax = std::max(vmax, std::abs(kin.velocity[k]));
  }
  const double v0 = std::abs(kin.velocity[0]);
  const double machine = 64 * std::numeric_limits<double>::epsilon() * vmax;
  report(6, ev <= 1e-3 && ea <= 1e-2 && v0 <= machine, "Derivative fidelity",
         fmt("all samples: max |v err| = %.2e (<= 1e-3), max |a err| = %.2e (<= 1e-2) at t = %.2f s; "
             "t <= 2 s: %.2e, %.2e; |v(0)| = %.1e (<= %.1e)",
             ev, ea, worst_a * dt, ev_in, ea_in, v0, machine),
         since(t0));
}

// 7. Chain case against the tridiagonal solve; maximum principle in 2D.
void interpolation_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> val(50, 500);
  std::bernoulli_distribution pick(0.2);
  double chain_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + trial;
    std::vector<double> vals(n, 0.0);
    std::vector<std::uint8_t> known(n, 0);
    known[static_cast<std::size_t>(trial % n)] = 1;
    for (int i = 0; i < n; ++i)
      if (pick(rng)) known[i] = 1;
    for (int i = 0; i < n; ++i)
      if (known[i]) vals[i] = val(rng);
    const auto f = capability::solve_interpolation(n, 1, vals, known, {});
    const auto o = liftsim::testing::chain_oracle(vals, known);
    for (int i = 0; i < n; ++i) chain_err = std::max(chain_err, std::abs(f[i] - o[i]));
  }
  int violations = 0;
  std::bernoulli_distribution sparse(0.15);
  for (int trial = 0; trial < 50; ++trial) {
    const int nd = 16, nv = 12;
    std::vector<double> vals(nd * nv, 0.0);
    std::vector<std::uint8_t> known(nd * nv, 0);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t p = 0; p < vals.size(); ++p) {
      if (sparse(rng) || p == static_cast<std::size_t>(trial)) {
        known[p] = 1;
        vals[p] = val(rng);
        lo = std::min(lo, vals[p]);
        hi = std::max(hi, vals[p]);
      }
    }
    for (double f : capability::solve_interpolation(nd, nv, vals, known, {}))
      if (f < lo - 1e-9 || f > hi + 1e-9) ++violations;
  }
  report(7, chain_err <= 1e-10 && violations == 0, "Interpolation oracle",
         fmt("50 chains: max |f - tridiagonal| = %.2e <= 1e-10; 50 random 2D masks: %d maximum-principle violations",
             chain_err, violations),
         since(t0));
}

// 8. Halving the integrator step.
void integrator_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExerciseSetup setup{50, 0, 0, 0.5};
  const auto p = liftsim::testing::hill_profile(2.0 * setup.static_force());
  fatigue::IntegratorOptions a, b;
  a.dt = 0.005;
  b.dt = 0.0025;
  const auto ra = fatigue::max_exertion_rep(p, setup, fatigue::FatigueState(25.0), a);
  const auto rb = fatigue::max_exertion_rep(p, setup, fatigue::FatigueState(25.0), b);
  const double rel = std::abs(ra.duration - rb.duration) / rb.duration;
  report(8, ra.completed && rb.completed && rel < 0.005, "Integrator convergence",
         fmt("duration %.5f s at 5 ms, %.5f s at 2.5 ms, change %.3f%% < 0.5%%", ra.duration, rb.duration, 100 * rel),
         since(t0));
}

// 9. Monotonicity enforcement on random profiles; PAVA against the
// exhaustive partition solution of the projection problem.
void monotonicity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0, 100);
  int failing = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int nd = 3 + trial % 10, nv = 2 + trial % 9;
    std::vector<double> s(static_cast<std::size_t>(nd) * nv);
    for (auto& v : s) v = u(rng);
    const auto q = capability::enforce_monotonicity(CapabilityProfile(nd, nv, 0.5, 1.0, s));
    if (!capability::check_monotonicity(q).empty()) ++failing;
  }
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> y(1 + trial % 5);
    for (auto& v : y) v = u(rng);
    const auto x = capability::antitonic_regression(y);
    const auto o = liftsim::testing::antitonic_oracle(y);
    for (std::size_t k = 0; k < y.size(); ++k) worst = std::max(worst, std::abs(x[k] - o[k]));
  }
  report(9, failing == 0 && worst <= 1e-12, "Monotonicity enforcement",
         fmt("100 random profiles, %d fail the check; 500 rows (length 1-5): max |PAVA - oracle| = %.2e", failing,
             worst),
         since(t0));
}

}  // namespace

int main() {
  brzycki();
  one_rep_max_consistency();
  reconstruction_roundtrip();
  dp_vs_enumeration();
  tracking();
  derivative_fidelity();
  interpolation_oracle();
  integrator_convergence();
  monotonicity();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
