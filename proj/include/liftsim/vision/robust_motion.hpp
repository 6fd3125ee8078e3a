#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "liftsim/vision/affine_tracker.hpp"

namespace liftsim::vision {

struct DisplacementSample {
  double dx = 0.0;
  double dy = 0.0;
  // True when no displacement survived the median gate (or no track was
  // alive) and the previous frame's value was carried forward.
  bool propagated = false;
};

namespace detail {

inline double median(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace detail

// Robust mean load displacement per frame. At frame k every track still alive
// at k contributes its displacement from its own first position; members more
// than median_gate pixels (Euclidean) from the component-wise median are
// dropped and the rest averaged.
inline std::vector<DisplacementSample> robust_displacement(const std::vector<FeatureTrack>& tracks,
                                                           const TrackerConfig& cfg = {}) {
  cfg.validate();
  if (tracks.empty()) throw InputError("robust_displacement: no tracks");
  int first = tracks.front().start_frame;
  int last = tracks.front().last_frame();
  for (const auto& t : tracks) {
    if (t.positions.empty()) throw InputError("robust_displacement: track with no positions");
    first = std::min(first, t.start_frame);
    last = std::max(last, t.last_frame());
  }
  if (first != 0) throw InputError("robust_displacement: no track alive at frame 0");

  std::vector<DisplacementSample> out(static_cast<std::size_t>(last) + 1);
  std::vector<double> xs, ys;
  for (int k = 0; k <= last; ++k) {
    xs.clear();
    ys.clear();
    for (const auto& t : tracks) {
      if (k < t.start_frame || k > t.last_frame()) continue;
      const Point2& p = t.positions[static_cast<std::size_t>(k - t.start_frame)];
      xs.push_back(p.x - t.positions.front().x);
      ys.push_back(p.y - t.positions.front().y);
    }
    DisplacementSample& s = out[static_cast<std::size_t>(k)];
    if (xs.empty()) {
      s = k > 0 ? out[static_cast<std::size_t>(k - 1)] : DisplacementSample{};
      s.propagated = true;
      continue;
    }
    const double mx = detail::median(xs);
    const double my = detail::median(ys);
    double sx = 0.0, sy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::hypot(xs[i] - mx, ys[i] - my) <= cfg.median_gate) {
        sx += xs[i];
        sy += ys[i];
        ++n;
      }
    }
    if (n == 0) {
      s = k > 0 ? out[static_cast<std::size_t>(k - 1)] : DisplacementSample{};
      s.propagated = true;
      continue;
    }
    s = {sx / n, sy / n, false};
  }
  return out;
}

}  // namespace liftsim::vision
