#pragma once

#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "liftsim/capability/monotone.hpp"

namespace liftsim::capability {

// Quadratic penalty weights for neighbouring samples along delta, along v and
// along the (+delta, +v) diagonal.
struct PenaltyWeights {
  double k_delta = 1.0;
  double k_v = 1.0;
  double k_dv = 0.5;
};

// Minimizes
//   J = sum k_delta (F[i][j] - F[i+1][j])^2 + k_v (F[i][j] - F[i][j+1])^2
//       + k_dv (F[i][j] - F[i+1][j+1])^2
// over the unknown samples with the known ones held fixed. Works on any
// nd x nv grid (nv == 1 gives a chain). Returns the full grid.
inline std::vector<double> solve_interpolation(int nd, int nv, const std::vector<double>& values,
                                               const std::vector<std::uint8_t>& known, const PenaltyWeights& w) {
  detail::require(nd >= 1 && nv >= 1, "solve_interpolation: empty grid");
  const auto n = static_cast<std::size_t>(nd) * static_cast<std::size_t>(nv);
  detail::require(values.size() == n && known.size() == n, "solve_interpolation: size mismatch");
  detail::require(w.k_delta > 0.0 && w.k_v > 0.0 && w.k_dv > 0.0, "solve_interpolation: weights must be positive");

  std::vector<int> unknown_id(n, -1);
  int n_unknown = 0;
  std::size_t n_known = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (known[p]) {
      ++n_known;
    } else {
      unknown_id[p] = n_unknown++;
    }
  }
  if (n_known == 0) throw NumericalError("solve_interpolation: no known sample, system is singular");
  if (n_unknown == 0) return values;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknown);
  auto link = [&](std::size_t p, std::size_t q, double k) {
    const int up = unknown_id[p], uq = unknown_id[q];
    if (up >= 0) {
      trip.emplace_back(up, up, k);
      if (uq >= 0) {
        trip.emplace_back(up, uq, -k);
      } else {
        rhs[up] += k * values[q];
      }
    }
    if (uq >= 0) {
      trip.emplace_back(uq, uq, k);
      if (up >= 0) {
        trip.emplace_back(uq, up, -k);
      } else {
        rhs[uq] += k * values[p];
      }
    }
  };
  auto at = [nv](int i, int j) { return static_cast<std::size_t>(i) * nv + j; };
  for (int i = 0; i < nd; ++i) {
    for (int j = 0; j < nv; ++j) {
      if (i + 1 < nd) link(at(i, j), at(i + 1, j), w.k_delta);
      if (j + 1 < nv) link(at(i, j), at(i, j + 1), w.k_v);
      if (i + 1 < nd && j + 1 < nv) link(at(i, j), at(i + 1, j + 1), w.k_dv);
    }
  }
  Eigen::SparseMatrix<double> A(n_unknown, n_unknown);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw NumericalError("solve_interpolation: factorization failed");
  const Eigen::VectorXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite()) throw NumericalError("solve_interpolation: solve failed");

  std::vector<double> out = values;
  for (std::size_t p = 0; p < n; ++p) {
    if (unknown_id[p] >= 0) out[p] = x[unknown_id[p]];
  }
  return out;
}

// Fills the unknown samples of `known_values` from the known ones, then
// enforces strict decrease along v.
inline CapabilityProfile interpolate_profile(const CapabilityProfile& known_values, const KnownMask& mask,
                                             const PenaltyWeights& w = {}) {
  detail::require(mask.nd == known_values.nd() && mask.nv == known_values.nv(),
                  "interpolate_profile: mask shape does not match profile");
  auto filled = solve_interpolation(known_values.nd(), known_values.nv(), known_values.samples(), mask.known, w);
  for (double& f : filled) f = std::max(0.0, f);
  return enforce_monotonicity(CapabilityProfile(known_values.nd(), known_values.nv(), known_values.delta_max(),
                                                known_values.v_max(), std::move(filled)));
}

}  // namespace liftsim::capability
