#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "liftsim/kinematics/finite_difference.hpp"

namespace liftsim::kinematics {

struct RepetitionSegment {
  std::size_t start_index = 0;
  std::size_t end_index = 0;
};

struct SegmentationConfig {
  double min_displacement = 0.1;    // m
  double min_pause = 0.2;           // s
  double velocity_deadband = 0.02;  // m/s
  double smoothing_window = 0.1;    // s, centred moving average on the velocity
};

// Concentric (rising) portions of a lift. A segment spans from the last rest
// sample before the smoothed velocity exceeds the deadband to the first rest
// sample after it drops back. Rising runs separated by less than min_pause
// are one lift; runs rising less than min_displacement are dropped.
inline std::vector<RepetitionSegment> segment_concentric(const ElevationSeries& series,
                                                         const SegmentationConfig& cfg = {}) {
  detail::require(cfg.min_displacement > 0.0 && cfg.min_pause >= 0.0 && cfg.velocity_deadband >= 0.0,
                  "segment_concentric: thresholds must be non-negative");
  const std::size_t n = series.size();
  std::vector<double> raw(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) raw[k] = (series[k + 1] - series[k - 1]) / (2.0 * series.dt());
  raw[0] = (series[1] - series[0]) / series.dt();
  raw[n - 1] = (series[n - 1] - series[n - 2]) / series.dt();

  const auto half = static_cast<std::ptrdiff_t>(std::floor(0.5 * cfg.smoothing_window / series.dt()));
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(k) - half));
    const auto hi = std::min(n - 1, k + static_cast<std::size_t>(half));
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += raw[j];
    v[k] = s / static_cast<double>(hi - lo + 1);
  }

  struct Run {
    std::size_t first, last;  // indices with v > deadband
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < n; ++k) {
    if (v[k] > cfg.velocity_deadband) {
      if (!runs.empty() && runs.back().last + 1 == k) {
        runs.back().last = k;
      } else {
        runs.push_back({k, k});
      }
    }
  }
  std::vector<Run> merged;
  for (const Run& r : runs) {
    if (!merged.empty()) {
      const double gap = static_cast<double>(r.first - merged.back().last - 1) * series.dt();
      if (gap < cfg.min_pause) {
        merged.back().last = r.last;
        continue;
      }
    }
    merged.push_back(r);
  }

  std::vector<RepetitionSegment> out;
  for (const Run& r : merged) {
    const std::size_t start = r.first > 0 ? r.first - 1 : 0;
    const std::size_t end = std::min(n - 1, r.last + 1);
    if (end <= start) continue;
    if (series[end] - series[start] < cfg.min_displacement) continue;
    if (!out.empty() && start <= out.back().end_index) continue;
    out.push_back({start, end});
  }
  return out;
}

}  // namespace liftsim::kinematics
