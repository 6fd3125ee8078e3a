#pragma once

// Batch stages chaining the modules: frames to displacement, displacement
// to a reconstructed capability profile.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liftsim/capability/interpolation.hpp"
#include "liftsim/capability/reconstruction.hpp"
#include "liftsim/io/csv.hpp"
#include "liftsim/io/json_io.hpp"
#include "liftsim/kinematics/segmentation.hpp"
#include "liftsim/kinematics/smoothing_spline.hpp"
#include "liftsim/vision/affine_tracker.hpp"
#include "liftsim/vision/interest_points.hpp"
#include "liftsim/vision/robust_motion.hpp"

namespace liftsim::pipeline {

struct TrackOutput {
  std::vector<vision::FeatureTrack> tracks;
  std::vector<vision::DisplacementSample> displacement;
};

inline TrackOutput track_frames(const std::vector<vision::GrayFrame>& frames, const std::vector<vision::Point2>& roi,
                                const vision::TrackerConfig& cfg = {}) {
  detail::require(frames.size() >= 2, "track: need at least 2 frames");
  const auto points = vision::detect_interest_points(frames.front(), cfg);
  const auto seeds = vision::seed_features(points, roi);
  if (seeds.empty()) throw InputError("track: no interest points inside the region of interest");
  TrackOutput out;
  out.tracks = vision::track_sequence(frames, seeds, cfg);
  out.displacement = vision::robust_displacement(out.tracks, cfg);
  return out;
}

struct ReconstructSet {
  std::vector<vision::DisplacementSample> displacement;
  double dt = 0.04;                 // s per frame
  double metres_per_pixel = 0.0;
  std::vector<int> failed_reps;     // indices into the detected concentric segments
  dynamics::ExerciseSetup setup;
};

struct ReconstructOptions {
  double omega = 0.99;
  double time_constant = 25.0;      // s
  int nd = 64;
  int nv = 64;
  std::optional<double> v_max;      // m/s; default 1.25 x fastest path velocity
  kinematics::SegmentationConfig segmentation{};
  capability::PenaltyWeights weights{};
  capability::FailureRepOptions failure{};
};

struct ReconstructOutput {
  capability::CapabilityProfile profile;
  capability::KnownMask mask;
  std::vector<capability::CapabilityPath> failure_paths;
  std::vector<double> scale_factors;
};

// Path through the capability plane of one concentric segment: spline
// kinematics from the segment start, force by inverse dynamics.
inline capability::CapabilityPath segment_path(const kinematics::ElevationSeries& elevation,
                                               const kinematics::RepetitionSegment& seg,
                                               const dynamics::ExerciseSetup& setup, double omega) {
  const auto part = elevation.slice(seg.start_index, seg.end_index);
  std::vector<double> rel(part.values().begin(), part.values().end());
  const double base = rel.front();
  for (double& v : rel) v -= base;
  const kinematics::ElevationSeries s(part.dt(), std::move(rel));
  const auto k = kinematics::spline_kinematics(s, omega);
  capability::CapabilityPath path;
  for (std::size_t i = 0; i < s.size(); ++i) {
    path.push_back({s.time(i), k.elevation[i], k.velocity[i],
                    dynamics::effective_force(setup, k.velocity[i], k.acceleration[i]), 1.0});
  }
  return path;
}

inline ReconstructOutput reconstruct(const std::vector<ReconstructSet>& sets, const ReconstructOptions& opt) {
  detail::require(!sets.empty(), "reconstruct: no sets");
  std::size_t n_failed = 0;
  for (const auto& s : sets) n_failed += s.failed_reps.size();
  if (n_failed == 0) throw InputError("reconstruct: no failed repetition in the manifest, nothing to reconstruct from");

  ReconstructOutput out;
  std::vector<std::size_t> owner;
  double delta_max = 0.0, fastest = 0.0;
  for (std::size_t si = 0; si < sets.size(); ++si) {
    const auto& set = sets[si];
    set.setup.validate();
    detail::require(set.metres_per_pixel > 0.0, "reconstruct: calibration (metres per pixel) must be positive");
    delta_max = std::max(delta_max, set.setup.range_of_motion);
    if (set.failed_reps.empty()) continue;
    std::vector<double> dy;
    for (const auto& d : set.displacement) dy.push_back(d.dy);
    const auto elevation = kinematics::elevation_from_pixels(dy, set.dt, kinematics::Calibration{set.metres_per_pixel});
    const auto segs = kinematics::segment_concentric(elevation, opt.segmentation);
    for (int r : set.failed_reps) {
      if (r < 0 || static_cast<std::size_t>(r) >= segs.size()) {
        throw InputError("reconstruct: failed repetition index " + std::to_string(r) + " but only " +
                         std::to_string(segs.size()) + " concentric segments were detected");
      }
      auto path = segment_path(elevation, segs[static_cast<std::size_t>(r)], set.setup, opt.omega);
      for (const auto& p : path) fastest = std::max(fastest, p.velocity);
      out.failure_paths.push_back(std::move(path));
      owner.push_back(si);
    }
  }
  if (!(fastest > 0.0)) throw InputError("reconstruct: failed repetitions show no upward motion");
  const capability::GridGeometry grid{opt.nd, opt.nv, delta_max, opt.v_max ? *opt.v_max : 1.25 * fastest};

  // One reconstruction per set (all its failed reps share the set's scale).
  std::vector<capability::Reconstruction> per_set;
  std::vector<double> static_forces;
  for (std::size_t si = 0; si < sets.size(); ++si) {
    std::vector<capability::Reconstruction> parts;
    for (std::size_t k = 0; k < out.failure_paths.size(); ++k) {
      if (owner[k] != si) continue;
      parts.push_back(capability::reconstruct_from_failure_rep(out.failure_paths[k], grid, opt.time_constant, 0.0,
                                                               opt.failure));
    }
    if (parts.empty()) continue;
    // Reps of one set share the set's scale, so coinciding nodes are averaged.
    std::map<std::pair<int, int>, std::pair<double, int>> acc;
    for (const auto& p : parts)
      for (const auto& n : p.nodes) {
        auto& slot = acc[{n.delta_index, n.v_index}];
        slot.first += n.value;
        slot.second += 1;
      }
    capability::Reconstruction r{grid, {}, capability::KnownMask(grid.nd, grid.nv)};
    for (const auto& [key, sum] : acc) {
      r.nodes.push_back({key.first, key.second, sum.first / sum.second});
      r.mask.set(key.first, key.second);
    }
    per_set.push_back(std::move(r));
    static_forces.push_back(sets[si].setup.static_force());
  }
  const auto merged = capability::merge_reconstructions(per_set, static_forces);
  out.scale_factors = merged.scale_factors;
  out.mask = merged.merged.mask;
  out.profile = capability::interpolate_profile(capability::to_known_profile(merged.merged), out.mask, opt.weights);
  return out;
}

// Manifest: {"sets": [{"displacement_csv": PATH, "dt_s": S, "metres_per_pixel": K,
//                      "failed_reps": [i, ...], "setup": {...}}, ...]}
// Relative paths resolve against the manifest's directory; dt, calibration
// and setup fall back to the supplied defaults.
inline std::vector<ReconstructSet> read_manifest(const std::string& path, const ReconstructSet& defaults) {
  auto in = io::open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto j = io::parse_json(ss.str(), "manifest");
  if (!j.is_object() || !j.contains("sets") || !j["sets"].is_array()) {
    throw InputError("manifest: expected an object with a 'sets' array");
  }
  const auto dir = std::filesystem::path(path).parent_path();
  std::vector<ReconstructSet> sets;
  for (const auto& s : j["sets"]) {
    for (const auto& [k, v] : s.items()) {
      if (k != "displacement_csv" && k != "dt_s" && k != "metres_per_pixel" && k != "failed_reps" && k != "setup") {
        throw InputError("manifest: unknown set field '" + k + "'");
      }
    }
    ReconstructSet r = defaults;
    if (!s.contains("displacement_csv") || !s["displacement_csv"].is_string()) {
      throw InputError("manifest: every set needs 'displacement_csv'");
    }
    std::filesystem::path csv = s["displacement_csv"].get<std::string>();
    if (csv.is_relative()) csv = dir / csv;
    auto f = io::open_in(csv.string());
    r.displacement = io::read_displacement_csv(f);
    if (s.contains("dt_s")) r.dt = io::detail::number(s, "dt_s", "manifest");
    if (s.contains("metres_per_pixel")) r.metres_per_pixel = io::detail::number(s, "metres_per_pixel", "manifest");
    r.failed_reps.clear();
    if (s.contains("failed_reps")) {
      if (!s["failed_reps"].is_array()) throw InputError("manifest: 'failed_reps' must be an array");
      for (const auto& i : s["failed_reps"]) {
        if (!i.is_number_integer()) throw InputError("manifest: 'failed_reps' entries must be integers");
        r.failed_reps.push_back(i.get<int>());
      }
    }
    if (s.contains("setup")) r.setup = io::apply_setup_json(r.setup, s["setup"], "manifest setup");
    detail::require(r.dt > 0.0, "manifest: dt_s must be positive");
    sets.push_back(std::move(r));
  }
  if (sets.empty()) throw InputError("manifest: no sets");
  return sets;
}

}  // namespace liftsim::pipeline
