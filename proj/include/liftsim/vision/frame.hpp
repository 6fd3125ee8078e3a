#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "liftsim/errors.hpp"

namespace liftsim::vision {

// One grayscale frame, intensities in [0,1], row-major.
class GrayFrame {
 public:
  GrayFrame() = default;

  GrayFrame(int width, int height, std::vector<double> intensities)
      : width_(width), height_(height), data_(std::move(intensities)) {
    detail::require(width > 0 && height > 0, "GrayFrame: dimensions must be positive");
    detail::require(data_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                    "GrayFrame: intensity count does not match width*height");
    for (double v : data_) {
      detail::require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                      "GrayFrame: intensities must be finite and in [0,1]");
    }
  }

  static GrayFrame filled(int width, int height, double value) {
    return GrayFrame(width, height,
                     std::vector<double>(static_cast<std::size_t>(width) * height, value));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const double> intensities() const { return data_; }

  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// Unconstrained float image used for intermediate results (blurred levels,
// DoG responses, gradients). Values may be negative.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  static Image from(const GrayFrame& frame) {
    Image img(frame.width(), frame.height());
    std::copy(frame.intensities().begin(), frame.intensities().end(), img.data.begin());
    return img;
  }

  double& operator()(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double operator()(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  bool contains(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x <= width - 1.0 && y <= height - 1.0;
  }

  // Bilinear lookup; caller guarantees contains(x, y).
  double bilinear(double x, double y) const {
    const int x0 = std::min(static_cast<int>(std::floor(x)), width - 2 < 0 ? 0 : width - 2);
    const int y0 = std::min(static_cast<int>(std::floor(y)), height - 2 < 0 ? 0 : height - 2);
    const double fx = x - x0;
    const double fy = y - y0;
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double top = (1.0 - fx) * (*this)(x0, y0) + fx * (*this)(x1, y0);
    const double bottom = (1.0 - fx) * (*this)(x0, y1) + fx * (*this)(x1, y1);
    return (1.0 - fy) * top + fy * bottom;
  }
};

// Half-resolution image by 2x2 box averaging. A full-resolution coordinate X
// maps to (X - 0.5) / 2 at the coarser level.
inline Image downsample2(const Image& src) {
  const int w = std::max(1, src.width / 2);
  const int h = std::max(1, src.height / 2);
  Image dst(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(2 * x, src.width - 1);
      const int sy = std::min(2 * y, src.height - 1);
      const int sx1 = std::min(sx + 1, src.width - 1);
      const int sy1 = std::min(sy + 1, src.height - 1);
      dst(x, y) = 0.25 * (src(sx, sy) + src(sx1, sy) + src(sx, sy1) + src(sx1, sy1));
    }
  }
  return dst;
}

// Central-difference gradients (one-sided at the border).
inline void gradients(const Image& img, Image& gx, Image& gy) {
  gx = Image(img.width, img.height);
  gy = Image(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int xm = std::max(x - 1, 0), xp = std::min(x + 1, img.width - 1);
      const int ym = std::max(y - 1, 0), yp = std::min(y + 1, img.height - 1);
      gx(x, y) = (img(xp, y) - img(xm, y)) / std::max(1, xp - xm);
      gy(x, y) = (img(x, yp) - img(x, ym)) / std::max(1, yp - ym);
    }
  }
}

}  // namespace liftsim::vision
