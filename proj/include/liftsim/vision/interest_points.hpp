#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "liftsim/vision/scale_space.hpp"

namespace liftsim::vision {

struct InterestPoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 0.0;     // DoG index s; the response compares levels s and s+1
  double response = 0.0;  // |DoG|
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Difference-of-Gaussian stack: dog[s-1] = L(s+1) - L(s), s = 1..n_scales-1.
inline std::vector<Image> difference_of_gaussians(const ScaleSpace& ss) {
  std::vector<Image> dog;
  for (int s = 1; s < ss.n_scales(); ++s) {
    const Image& lo = ss.level(s);
    const Image& hi = ss.level(s + 1);
    Image d(lo.width, lo.height);
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] = hi.data[i] - lo.data[i];
    dog.push_back(std::move(d));
  }
  return dog;
}

namespace detail {

inline bool is_extremum_3x3x3(const std::vector<Image>& dog, std::size_t s, int x, int y) {
  const double c = dog[s](x, y);
  bool is_max = true;
  bool is_min = true;
  for (std::size_t ds = s - 1; ds <= s + 1; ++ds) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (ds == s && dx == 0 && dy == 0) continue;
        const double n = dog[ds](x + dx, y + dy);
        if (n >= c) is_max = false;
        if (n <= c) is_min = false;
      }
    }
    if (!is_max && !is_min) return false;
  }
  return is_max || is_min;
}

// Rejects line-like loci: tr(H)^2 / det(H) must stay below (r+1)^2 / r.
inline bool passes_edge_test(const Image& d, int x, int y, double r) {
  const double dxx = d(x + 1, y) + d(x - 1, y) - 2.0 * d(x, y);
  const double dyy = d(x, y + 1) + d(x, y - 1) - 2.0 * d(x, y);
  const double dxy = 0.25 * (d(x + 1, y + 1) - d(x + 1, y - 1) - d(x - 1, y + 1) + d(x - 1, y - 1));
  const double tr = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  if (det <= 0.0) return false;
  return tr * tr / det < (r + 1.0) * (r + 1.0) / r;
}

}  // namespace detail

inline std::vector<InterestPoint> detect_interest_points(const GrayFrame& frame, const TrackerConfig& cfg) {
  const ScaleSpace ss = build_scale_space(frame, cfg);
  const auto dog = difference_of_gaussians(ss);
  std::vector<InterestPoint> points;
  for (std::size_t s = 1; s + 1 < dog.size(); ++s) {
    const Image& d = dog[s];
    for (int y = 1; y < d.height - 1; ++y) {
      for (int x = 1; x < d.width - 1; ++x) {
        const double response = std::abs(d(x, y));
        if (response < cfg.contrast_threshold) continue;
        if (!detail::is_extremum_3x3x3(dog, s, x, y)) continue;
        if (!detail::passes_edge_test(d, x, y, cfg.edge_eigenvalue_ratio)) continue;
        points.push_back({static_cast<double>(x), static_cast<double>(y), static_cast<double>(s + 1), response});
      }
    }
  }
  return points;
}

// Tracking window side for a point detected at DoG index s.
inline int window_size_for(const InterestPoint& p, const TrackerConfig& cfg) {
  const int half = static_cast<int>(std::ceil(cfg.window_scale_factor * p.scale * cfg.sigma));
  return std::max(cfg.min_window_size, 2 * half + 1);
}

// Boundary-inclusive point-in-polygon.
inline bool point_in_polygon(const Point2& p, const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (std::abs(cross) <= kTol * std::max(1.0, len) && p.x >= std::min(a.x, b.x) - kTol &&
        p.x <= std::max(a.x, b.x) + kTol && p.y >= std::min(a.y, b.y) - kTol &&
        p.y <= std::max(a.y, b.y) + kTol) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

namespace detail {

inline double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace detail

inline bool is_simple_polygon(const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
      if (detail::segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

inline std::vector<InterestPoint> seed_features(const std::vector<InterestPoint>& points,
                                                const std::vector<Point2>& region) {
  if (region.size() < 3) throw InputError("seed_features: region polygon needs at least 3 vertices");
  if (!is_simple_polygon(region)) throw InputError("seed_features: region polygon self-intersects");
  std::vector<InterestPoint> out;
  for (const auto& p : points) {
    if (point_in_polygon({p.x, p.y}, region)) out.push_back(p);
  }
  return out;
}

}  // namespace liftsim::vision
