#pragma once

#include <cmath>
#include <vector>

#include "liftsim/vision/config.hpp"
#include "liftsim/vision/frame.hpp"

namespace liftsim::vision {

// Normalized, truncated 1D Gaussian. Radius 5*std keeps the truncated mass
// below 1e-6 of the total.
inline std::vector<double> gaussian_kernel(double std_dev) {
  const int radius = static_cast<int>(std::ceil(5.0 * std_dev));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (std_dev * std_dev));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

inline int kernel_support(double std_dev) {
  return 2 * static_cast<int>(std::ceil(5.0 * std_dev)) + 1;
}

// Separable convolution with mirrored borders (edge sample not repeated).
inline Image gaussian_blur(const Image& src, double std_dev) {
  const auto k = gaussian_kernel(std_dev);
  const int r = static_cast<int>(k.size() / 2);
  auto mirror = [](int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
  };
  Image tmp(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * src(mirror(x + i, src.width), y);
      tmp(x, y) = acc;
    }
  }
  Image dst(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp(x, mirror(y + i, src.height));
      dst(x, y) = acc;
    }
  }
  return dst;
}

// Stack of blurred copies of one frame. levels[s-1] is blurred with std s*sigma.
struct ScaleSpace {
  double sigma = 0.0;
  std::vector<Image> levels;

  int n_scales() const { return static_cast<int>(levels.size()); }
  const Image& level(int s) const { return levels.at(static_cast<std::size_t>(s - 1)); }
  double level_std(int s) const { return s * sigma; }
};

inline ScaleSpace build_scale_space(const GrayFrame& frame, const TrackerConfig& cfg) {
  cfg.validate();
  const int support = kernel_support(cfg.n_scales * cfg.sigma);
  if (frame.width() < support || frame.height() < support) {
    throw InputError("build_scale_space: frame " + std::to_string(frame.width()) + "x" +
                     std::to_string(frame.height()) + " is smaller than the largest kernel support " +
                     std::to_string(support));
  }
  ScaleSpace ss;
  ss.sigma = cfg.sigma;
  const Image base = Image::from(frame);
  ss.levels.reserve(static_cast<std::size_t>(cfg.n_scales));
  for (int s = 1; s <= cfg.n_scales; ++s) ss.levels.push_back(gaussian_blur(base, s * cfg.sigma));
  return ss;
}

}  // namespace liftsim::vision
