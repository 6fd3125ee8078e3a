#pragma once

#include <span>
#include <vector>

#include "liftsim/capability/profile.hpp"

namespace liftsim::capability {

// Tie-breaking margin subtracted per velocity step after isotonic regression.
inline constexpr double kStrictnessMargin = 1e-6;  // N

struct GridPair {
  int delta_index = 0;
  int v_index = 0;  // the pair is (v_index, v_index + 1)

  bool operator==(const GridPair&) const = default;
};

// Adjacent-in-velocity pairs where capability fails to strictly decrease.
inline std::vector<GridPair> check_monotonicity(const CapabilityProfile& p) {
  std::vector<GridPair> bad;
  for (int i = 0; i < p.nd(); ++i) {
    for (int j = 0; j + 1 < p.nv(); ++j) {
      if (!(p.at(i, j) > p.at(i, j + 1))) bad.push_back({i, j});
    }
  }
  return bad;
}

// Least-squares non-increasing fit (pool adjacent violators).
inline std::vector<double> antitonic_regression(std::span<const double> y) {
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  for (double v : y) {
    blocks.push_back({v, 1});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
      Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean());
  return out;
}

// Per-row antitonic regression in v, then a strictness ramp of
// kStrictnessMargin per velocity step. The ramp is anchored at v = 0 (values
// drop by margin * j) unless that would push the row end below zero, in which
// case it is anchored at v_max instead (values rise by margin * (nv-1-j)).
inline CapabilityProfile enforce_monotonicity(const CapabilityProfile& p) {
  std::vector<double> s(p.samples().size());
  const int nv = p.nv();
  for (int i = 0; i < p.nd(); ++i) {
    const std::span<const double> row(p.samples().data() + p.index(i, 0), static_cast<std::size_t>(nv));
    const auto fit = antitonic_regression(row);
    const bool anchor_low = fit.back() - kStrictnessMargin * (nv - 1) >= 0.0;
    for (int j = 0; j < nv; ++j) {
      s[p.index(i, j)] = anchor_low ? fit[static_cast<std::size_t>(j)] - kStrictnessMargin * j
                                    : fit[static_cast<std::size_t>(j)] + kStrictnessMargin * (nv - 1 - j);
    }
  }
  return CapabilityProfile(p.nd(), p.nv(), p.delta_max(), p.v_max(), std::move(s));
}

}  // namespace liftsim::capability
