#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "liftsim/capability/path.hpp"
#include "liftsim/capability/profile.hpp"

namespace liftsim::capability {

struct GridGeometry {
  int nd = 64;
  int nv = 64;
  double delta_max = 0.5;
  double v_max = 1.0;

  double delta_step() const { return delta_max / (nd - 1); }
  double v_step() const { return v_max / (nv - 1); }
};

struct NodeValue {
  int delta_index = 0;
  int v_index = 0;
  double value = 0.0;
};

// Capability samples recovered along one or more failed repetitions.
struct Reconstruction {
  GridGeometry grid;
  std::vector<NodeValue> nodes;
  KnownMask mask;

  // Dense grid with the reconstructed values and zeros elsewhere.
  std::vector<double> dense() const {
    std::vector<double> s(static_cast<std::size_t>(grid.nd) * grid.nv, 0.0);
    for (const auto& n : nodes) s[static_cast<std::size_t>(n.delta_index) * grid.nv + n.v_index] = n.value;
    return s;
  }
};

struct FailureRepOptions {
  // Largest final velocity still treated as a stall.
  double terminal_velocity_tolerance = 0.05;  // m/s
};

// During the failed repetition exertion is maximal throughout, so
//   F(t) = Fhat * exp(-L0 - t / T_F)   and   Fhat = F(t) * exp(L0 + t / T_F),
// with L0 the fatigue carried into the repetition. Each path sample lands on
// its nearest grid node; samples sharing a node are averaged. Samples outside
// the grid are skipped. T_F may be +infinity (no fatigue correction).
inline Reconstruction reconstruct_from_failure_rep(const CapabilityPath& path, const GridGeometry& grid,
                                                   double fatigue_time_constant, double entry_fatigue = 0.0,
                                                   const FailureRepOptions& opt = {}) {
  detail::require(grid.nd >= 2 && grid.nv >= 2 && grid.delta_max > 0.0 && grid.v_max > 0.0,
                  "reconstruct_from_failure_rep: invalid grid");
  detail::require(fatigue_time_constant > 0.0, "reconstruct_from_failure_rep: T_F must be positive");
  detail::require(std::isfinite(entry_fatigue) && entry_fatigue >= 0.0,
                  "reconstruct_from_failure_rep: entry fatigue must be finite and >= 0");
  detail::require(path.size() >= 2, "reconstruct_from_failure_rep: path needs at least 2 points");
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (!(path[k].t > path[k - 1].t)) throw InputError("reconstruct_from_failure_rep: time is not strictly increasing");
  }
  for (const auto& p : path) {
    if (p.delta >= grid.delta_max) {
      throw InputError("reconstruct_from_failure_rep: path reaches the end of the range, not a failed repetition");
    }
  }
  if (std::abs(path.back().velocity) > opt.terminal_velocity_tolerance) {
    throw InputError("reconstruct_from_failure_rep: path does not end at rest");
  }

  const double t0 = path.front().t;
  std::map<std::pair<int, int>, std::pair<double, int>> acc;
  for (const auto& p : path) {
    if (p.delta < 0.0 || p.velocity < 0.0 || p.velocity > grid.v_max) continue;
    const int i = static_cast<int>(std::lround(p.delta / grid.delta_step()));
    const int j = static_cast<int>(std::lround(p.velocity / grid.v_step()));
    const double elapsed = p.t - t0;
    const double growth = std::isinf(fatigue_time_constant) ? 0.0 : elapsed / fatigue_time_constant;
    const double fhat = std::max(0.0, p.force) * std::exp(entry_fatigue + growth);
    auto& slot = acc[{i, j}];
    slot.first += fhat;
    slot.second += 1;
  }

  Reconstruction r{grid, {}, KnownMask(grid.nd, grid.nv)};
  for (const auto& [key, sum] : acc) {
    r.nodes.push_back({key.first, key.second, sum.first / sum.second});
    r.mask.set(key.first, key.second);
  }
  return r;
}

struct MergeResult {
  Reconstruction merged;
  std::vector<double> scale_factors;  // one per input set, first is 1
};

// Brings several sets' reconstructions (each known only up to its own scale)
// onto the first set's scale. A set sharing grid nodes with the sets merged
// so far gets the least-squares scale on those nodes; a set sharing none is
// rescaled by the ratio of the first set's static force to its own.
inline MergeResult merge_reconstructions(const std::vector<Reconstruction>& sets,
                                         const std::vector<double>& static_forces) {
  detail::require(!sets.empty(), "merge_reconstructions: no sets");
  detail::require(static_forces.size() == sets.size(), "merge_reconstructions: one static force per set required");
  const GridGeometry grid = sets.front().grid;
  for (const auto& s : sets) {
    detail::require(s.grid.nd == grid.nd && s.grid.nv == grid.nv && s.grid.delta_max == grid.delta_max &&
                        s.grid.v_max == grid.v_max,
                    "merge_reconstructions: sets use different grids");
  }
  std::map<std::pair<int, int>, std::pair<double, int>> acc;
  MergeResult out;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    double scale = 1.0;
    if (k > 0) {
      double ab = 0.0, bb = 0.0;
      for (const auto& n : sets[k].nodes) {
        auto it = acc.find({n.delta_index, n.v_index});
        if (it == acc.end()) continue;
        ab += it->second.first / it->second.second * n.value;
        bb += n.value * n.value;
      }
      if (bb > 0.0) {
        scale = ab / bb;
      } else {
        detail::require(static_forces[k] > 0.0 && static_forces[0] > 0.0,
                        "merge_reconstructions: static forces must be positive to co-register disjoint sets");
        scale = static_forces[0] / static_forces[k];
      }
    }
    out.scale_factors.push_back(scale);
    for (const auto& n : sets[k].nodes) {
      auto& slot = acc[{n.delta_index, n.v_index}];
      slot.first += scale * n.value;
      slot.second += 1;
    }
  }
  out.merged = Reconstruction{grid, {}, KnownMask(grid.nd, grid.nv)};
  for (const auto& [key, sum] : acc) {
    out.merged.nodes.push_back({key.first, key.second, sum.first / sum.second});
    out.merged.mask.set(key.first, key.second);
  }
  return out;
}

inline CapabilityProfile to_known_profile(const Reconstruction& r) {
  return CapabilityProfile(r.grid.nd, r.grid.nv, r.grid.delta_max, r.grid.v_max, r.dense());
}

}  // namespace liftsim::capability
