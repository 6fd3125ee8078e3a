#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "liftsim/errors.hpp"

namespace liftsim::capability {

// Maximal force F(delta, v) sampled on a regular nd x nv grid over
// [0, delta_max] x [0, v_max]. Samples are row-major in delta:
// index(i, j) = i * nv + j with i the elevation index.
class CapabilityProfile {
 public:
  CapabilityProfile() = default;

  CapabilityProfile(int nd, int nv, double delta_max, double v_max, std::vector<double> samples)
      : nd_(nd), nv_(nv), delta_max_(delta_max), v_max_(v_max), samples_(std::move(samples)) {
    detail::require(nd >= 2 && nv >= 2, "CapabilityProfile: grid needs at least 2x2 samples");
    detail::require(std::isfinite(delta_max) && delta_max > 0.0, "CapabilityProfile: delta_max must be positive");
    detail::require(std::isfinite(v_max) && v_max > 0.0, "CapabilityProfile: v_max must be positive");
    detail::require(samples_.size() == static_cast<std::size_t>(nd) * static_cast<std::size_t>(nv),
                    "CapabilityProfile: sample count does not match grid");
    for (double f : samples_) {
      detail::require(std::isfinite(f) && f >= 0.0, "CapabilityProfile: samples must be finite and >= 0");
    }
  }

  template <typename Fn>
  static CapabilityProfile from_function(int nd, int nv, double delta_max, double v_max, Fn&& fn) {
    std::vector<double> s(static_cast<std::size_t>(nd) * static_cast<std::size_t>(nv));
    for (int i = 0; i < nd; ++i) {
      for (int j = 0; j < nv; ++j) {
        s[static_cast<std::size_t>(i) * nv + j] =
            fn(delta_max * i / (nd - 1), v_max * j / (nv - 1));
      }
    }
    return CapabilityProfile(nd, nv, delta_max, v_max, std::move(s));
  }

  int nd() const { return nd_; }
  int nv() const { return nv_; }
  double delta_max() const { return delta_max_; }
  double v_max() const { return v_max_; }
  double delta_step() const { return delta_max_ / (nd_ - 1); }
  double v_step() const { return v_max_ / (nv_ - 1); }
  double delta_at(int i) const { return delta_max_ * i / (nd_ - 1); }
  double v_at(int j) const { return v_max_ * j / (nv_ - 1); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nv_ + j; }
  double at(int i, int j) const { return samples_[index(i, j)]; }
  const std::vector<double>& samples() const { return samples_; }

  bool operator==(const CapabilityProfile&) const = default;

 private:
  int nd_ = 0;
  int nv_ = 0;
  double delta_max_ = 0.0;
  double v_max_ = 0.0;
  std::vector<double> samples_;
};

// Marks grid samples that were measured directly.
struct KnownMask {
  int nd = 0;
  int nv = 0;
  std::vector<std::uint8_t> known;

  KnownMask() = default;
  KnownMask(int nd_, int nv_) : nd(nd_), nv(nv_), known(static_cast<std::size_t>(nd_) * nv_, 0) {}

  bool operator()(int i, int j) const { return known[static_cast<std::size_t>(i) * nv + j] != 0; }
  void set(int i, int j, bool v = true) { known[static_cast<std::size_t>(i) * nv + j] = v ? 1 : 0; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto k : known) c += k != 0;
    return c;
  }
  bool operator==(const KnownMask&) const = default;
};

// Bilinear interpolation; exact at grid nodes.
inline double sample_profile(const CapabilityProfile& p, double delta, double v) {
  if (!(delta >= 0.0 && delta <= p.delta_max()) || !(v >= 0.0 && v <= p.v_max())) {
    throw InputError("sample_profile: query outside the capability plane");
  }
  auto snap = [](double f) {
    const double r = std::round(f);
    return std::abs(f - r) < 1e-9 ? r : f;
  };
  const double fi = snap(delta / p.delta_step());
  const double fj = snap(v / p.v_step());
  const int i0 = std::min(static_cast<int>(fi), p.nd() - 2);
  const int j0 = std::min(static_cast<int>(fj), p.nv() - 2);
  const double u = fi - i0;
  const double w = fj - j0;
  if (u == 0.0 && w == 0.0) return p.at(i0, j0);
  return (1.0 - u) * (1.0 - w) * p.at(i0, j0) + u * (1.0 - w) * p.at(i0 + 1, j0) +
         (1.0 - u) * w * p.at(i0, j0 + 1) + u * w * p.at(i0 + 1, j0 + 1);
}

// Capability with the velocity clamped onto the grid, for simulation states
// that outrun v_max.
inline double sample_profile_clamped(const CapabilityProfile& p, double delta, double v) {
  return sample_profile(p, std::clamp(delta, 0.0, p.delta_max()), std::clamp(v, 0.0, p.v_max()));
}

// Adds nu * exp(-(d-d0)^2/(2 sd^2) - (v-v0)^2/(2 sv^2)) (unit peak) to every
// sample, clamping at zero.
inline CapabilityProfile apply_gaussian_bump(const CapabilityProfile& p, double delta0, double v0, double nu,
                                             double sigma_delta, double sigma_v) {
  detail::require(sigma_delta > 0.0 && sigma_v > 0.0, "apply_gaussian_bump: widths must be positive");
  detail::require(std::isfinite(nu) && std::isfinite(delta0) && std::isfinite(v0),
                  "apply_gaussian_bump: non-finite bump parameters");
  std::vector<double> s = p.samples();
  for (int i = 0; i < p.nd(); ++i) {
    for (int j = 0; j < p.nv(); ++j) {
      const double dd = p.delta_at(i) - delta0;
      const double dv = p.v_at(j) - v0;
      const double g =
          std::exp(-dd * dd / (2.0 * sigma_delta * sigma_delta) - dv * dv / (2.0 * sigma_v * sigma_v));
      double& f = s[p.index(i, j)];
      f = std::max(0.0, f + nu * g);
    }
  }
  return CapabilityProfile(p.nd(), p.nv(), p.delta_max(), p.v_max(), std::move(s));
}

}  // namespace liftsim::capability
