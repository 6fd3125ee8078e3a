#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "liftsim/vision/config.hpp"
#include "liftsim/vision/frame.hpp"
#include "liftsim/vision/interest_points.hpp"

namespace liftsim::vision {

// Affine warp parameters (a1..a6). A window-centred offset x maps to
//   [(1+a1) x + a3 y + a5,  a2 x + (1+a4) y + a6].
using AffineParams = std::array<double, 6>;

// Square tracking window of odd side `size`, centred at (cx, cy).
struct TrackWindow {
  double cx = 0.0;
  double cy = 0.0;
  int size = 15;

  int half() const { return size / 2; }
};

// Image pyramid with gradients; level 0 is full resolution, level 2 is quarter.
struct Pyramid {
  std::array<Image, 3> image;
  std::array<Image, 3> grad_x;
  std::array<Image, 3> grad_y;

  explicit Pyramid(const GrayFrame& frame) : Pyramid(Image::from(frame)) {}

  explicit Pyramid(Image full) {
    image[0] = std::move(full);
    image[1] = downsample2(image[0]);
    image[2] = downsample2(image[1]);
    for (std::size_t l = 0; l < 3; ++l) gradients(image[l], grad_x[l], grad_y[l]);
  }
};

enum class TrackStatus { converged, max_iterations, singular, left_frame };

struct TrackStepResult {
  AffineParams a{};
  bool converged = false;
  TrackStatus status = TrackStatus::converged;
  // Sum of squared differences at each accepted iterate of the finest level,
  // starting with the value at the level's initial estimate.
  std::vector<double> finest_errors;
};

namespace detail {

struct LevelGeometry {
  double cx, cy;
  int half;
};

inline LevelGeometry level_geometry(const TrackWindow& w, int level) {
  const double f = static_cast<double>(1 << level);
  const int half = std::max(2, static_cast<int>(std::lround(w.half() / f)));
  return {(w.cx + 0.5) / f - 0.5, (w.cy + 0.5) / f - 0.5, half};
}

inline bool window_inside(const Image& img, const LevelGeometry& g) {
  return img.contains(g.cx - g.half, g.cy - g.half) && img.contains(g.cx + g.half, g.cy + g.half);
}

inline Eigen::Vector2d warp(const AffineParams& a, double x, double y) {
  return {(1.0 + a[0]) * x + a[2] * y + a[4], a[1] * x + (1.0 + a[3]) * y + a[5]};
}

// Sum of squared differences e(a); empty when a warped point leaves the image.
inline std::optional<double> ssd(const Image& next, const std::vector<double>& templ,
                                 const LevelGeometry& g, const AffineParams& a) {
  double e = 0.0;
  std::size_t idx = 0;
  for (int dy = -g.half; dy <= g.half; ++dy) {
    for (int dx = -g.half; dx <= g.half; ++dx, ++idx) {
      const Eigen::Vector2d w = warp(a, dx, dy);
      const double px = g.cx + w.x(), py = g.cy + w.y();
      if (!next.contains(px, py)) return std::nullopt;
      const double r = next.bilinear(px, py) - templ[idx];
      e += r * r;
    }
  }
  return e;
}

}  // namespace detail

// Estimates the affine warp taking `window` in prev onto next, coarse to fine
// over the three pyramid levels. a_init is expressed at full resolution.
inline TrackStepResult track_step(const Pyramid& prev, const Pyramid& next, const TrackWindow& window,
                                  const AffineParams& a_init, const TrackerConfig& cfg) {
  cfg.validate();
  if (!detail::window_inside(prev.image[0], detail::level_geometry(window, 0))) {
    throw InputError("track_step: window is not inside the previous frame");
  }
  TrackStepResult result;
  AffineParams a = a_init;
  a[4] /= 4.0;
  a[5] /= 4.0;

  for (int level = 2; level >= 0; --level) {
    const bool finest = level == 0;
    const detail::LevelGeometry g = detail::level_geometry(window, level);
    const Image& src = prev.image[level];
    const Image& dst = next.image[level];
    const Image& gx = next.grad_x[level];
    const Image& gy = next.grad_y[level];
    if (!detail::window_inside(src, g)) {
      result.a = a;
      result.converged = false;
      result.status = TrackStatus::left_frame;
      return result;
    }

    std::vector<double> templ;
    templ.reserve(static_cast<std::size_t>((2 * g.half + 1) * (2 * g.half + 1)));
    for (int dy = -g.half; dy <= g.half; ++dy)
      for (int dx = -g.half; dx <= g.half; ++dx) templ.push_back(src.bilinear(g.cx + dx, g.cy + dy));

    auto current = detail::ssd(dst, templ, g, a);
    if (!current) {
      result.a = a;
      result.status = TrackStatus::left_frame;
      result.converged = false;
      return result;
    }
    if (finest) result.finest_errors.push_back(*current);

    bool level_done = false;
    for (int it = 0; it < cfg.max_iterations && !level_done; ++it) {
      Eigen::Matrix<double, 6, 6> H = Eigen::Matrix<double, 6, 6>::Zero();
      Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();
      std::size_t idx = 0;
      for (int dy = -g.half; dy <= g.half; ++dy) {
        for (int dx = -g.half; dx <= g.half; ++dx, ++idx) {
          const Eigen::Vector2d w = detail::warp(a, dx, dy);
          const double px = g.cx + w.x(), py = g.cy + w.y();
          const double ix = gx.bilinear(px, py);
          const double iy = gy.bilinear(px, py);
          Eigen::Matrix<double, 6, 1> j;
          j << ix * dx, iy * dx, ix * dy, iy * dy, ix, iy;
          H.noalias() += j * j.transpose();
          b.noalias() += j * (templ[idx] - dst.bilinear(px, py));
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(H, Eigen::EigenvaluesOnly);
      const double max_eig = eig.eigenvalues().maxCoeff();
      if (!(max_eig > 0.0) || eig.eigenvalues().minCoeff() <= 1e-10 * max_eig) {
        result.a = a;
        result.converged = false;
        result.status = TrackStatus::singular;
        return result;
      }
      const Eigen::Matrix<double, 6, 1> step = H.ldlt().solve(b);

      // Accept the Gauss-Newton step only if e(a) does not grow; otherwise halve.
      double scale = 1.0;
      bool accepted = false;
      for (int attempt = 0; attempt < 6; ++attempt, scale *= 0.5) {
        AffineParams cand = a;
        for (int k = 0; k < 6; ++k) cand[k] += scale * step[k];
        const auto e = detail::ssd(dst, templ, g, cand);
        if (e && *e <= *current) {
          a = cand;
          current = e;
          accepted = true;
          break;
        }
      }
      if (accepted && finest) result.finest_errors.push_back(*current);
      // A rejected step means e(a) is already at a local minimum along the
      // Gauss-Newton direction.
      if (!accepted || scale * step.norm() <= cfg.epsilon) {
        level_done = true;
        break;
      }
      if (finest && it + 1 == cfg.max_iterations) {
        result.a = a;
        result.converged = false;
        result.status = TrackStatus::max_iterations;
        return result;
      }
    }
    if (!finest) {
      a[4] *= 2.0;
      a[5] *= 2.0;
    }
  }
  result.a = a;
  result.converged = true;
  result.status = TrackStatus::converged;
  return result;
}

inline TrackStepResult track_step(const GrayFrame& prev, const GrayFrame& next, const TrackWindow& window,
                                  const AffineParams& a_init, const TrackerConfig& cfg = {}) {
  return track_step(Pyramid(prev), Pyramid(next), window, a_init, cfg);
}

struct FeatureTrack {
  int start_frame = 0;
  std::vector<Point2> positions;  // one per frame from start_frame on
  int window_size = 15;
  bool alive = true;

  int last_frame() const { return start_frame + static_cast<int>(positions.size()) - 1; }
};

inline std::vector<FeatureTrack> seed_tracks(const std::vector<InterestPoint>& seeds, const TrackerConfig& cfg,
                                             int start_frame = 0) {
  std::vector<FeatureTrack> tracks;
  tracks.reserve(seeds.size());
  for (const auto& p : seeds) {
    tracks.push_back({start_frame, {{p.x, p.y}}, window_size_for(p, cfg), true});
  }
  return tracks;
}

// Advances every live track from frame `prev` to frame `next`. A track whose
// step fails is terminated and never resumed.
inline void advance_tracks(std::vector<FeatureTrack>& tracks, const Pyramid& prev, const Pyramid& next,
                           const TrackerConfig& cfg) {
  for (auto& track : tracks) {
    if (!track.alive) continue;
    const Point2 pos = track.positions.back();
    const TrackWindow window{pos.x, pos.y, track.window_size};
    if (!detail::window_inside(prev.image[0], detail::level_geometry(window, 0))) {
      track.alive = false;
      continue;
    }
    AffineParams init{};
    if (track.positions.size() >= 2) {
      const Point2& before = track.positions[track.positions.size() - 2];
      init[4] = pos.x - before.x;
      init[5] = pos.y - before.y;
    }
    const TrackStepResult r = track_step(prev, next, window, init, cfg);
    if (!r.converged) {
      track.alive = false;
      continue;
    }
    track.positions.push_back({pos.x + r.a[4], pos.y + r.a[5]});
  }
}

// Tracks seeds detected in frames.front() through the whole sequence.
inline std::vector<FeatureTrack> track_sequence(const std::vector<GrayFrame>& frames,
                                                const std::vector<InterestPoint>& seeds,
                                                const TrackerConfig& cfg = {}) {
  auto tracks = seed_tracks(seeds, cfg);
  if (frames.size() < 2) return tracks;
  Pyramid prev(frames[0]);
  for (std::size_t k = 1; k < frames.size(); ++k) {
    Pyramid next(frames[k]);
    advance_tracks(tracks, prev, next, cfg);
    prev = std::move(next);
  }
  return tracks;
}

}  // namespace liftsim::vision
