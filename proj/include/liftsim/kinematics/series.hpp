#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "liftsim/errors.hpp"

namespace liftsim {

inline constexpr double kPoundKg = 0.45359237;
inline constexpr double kStandardGravity = 9.80665;

inline constexpr double pounds_to_kg(double lb) { return lb * kPoundKg; }
inline constexpr double kg_to_pounds(double kg) { return kg / kPoundKg; }

}  // namespace liftsim

namespace liftsim::kinematics {

// Equidistant samples delta_k = delta(k * dt), metres.
class ElevationSeries {
 public:
  ElevationSeries(double dt, std::vector<double> values) : dt_(dt), values_(std::move(values)) {
    detail::require(dt > 0.0 && std::isfinite(dt), "ElevationSeries: dt must be positive");
    detail::require(values_.size() >= 3, "ElevationSeries: need at least 3 samples");
    for (double v : values_) detail::require(std::isfinite(v), "ElevationSeries: non-finite sample");
  }

  double dt() const { return dt_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double time(std::size_t k) const { return static_cast<double>(k) * dt_; }

  ElevationSeries slice(std::size_t first, std::size_t last) const {
    detail::require(first < last && last < values_.size() && last - first >= 2,
                    "ElevationSeries::slice: need at least 3 samples");
    return ElevationSeries(dt_, std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                                    values_.begin() + static_cast<std::ptrdiff_t>(last) + 1));
  }

 private:
  double dt_;
  std::vector<double> values_;
};

struct Calibration {
  double metres_per_pixel = 1.0;

  double to_metres(double pixels) const { return metres_per_pixel * pixels; }
};

inline Calibration calibrate(double pixel_length, double physical_length) {
  detail::require(pixel_length > 0.0 && std::isfinite(pixel_length), "calibrate: pixel length must be positive");
  detail::require(physical_length > 0.0 && std::isfinite(physical_length),
                  "calibrate: physical length must be positive");
  return {physical_length / pixel_length};
}

// Image rows grow downwards; elevation is the negated vertical displacement.
inline ElevationSeries elevation_from_pixels(std::span<const double> dy_pixels, double dt, const Calibration& cal) {
  std::vector<double> v(dy_pixels.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = -cal.to_metres(dy_pixels[k]);
  return ElevationSeries(dt, std::move(v));
}

}  // namespace liftsim::kinematics
