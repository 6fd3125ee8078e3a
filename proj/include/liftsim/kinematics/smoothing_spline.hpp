#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "liftsim/kinematics/series.hpp"

namespace liftsim::kinematics {

struct SplineSample {
  double value = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

// Cubic spline with a knot at every sample, stored as knot values and knot
// second derivatives (f'' is piecewise linear).
class SmoothingSpline {
 public:
  SmoothingSpline(std::vector<double> knots, std::vector<double> values, std::vector<double> second_derivs,
                  double omega)
      : t_(std::move(knots)), g_(std::move(values)), m_(std::move(second_derivs)), omega_(omega) {}

  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& knot_values() const { return g_; }
  const std::vector<double>& knot_second_derivatives() const { return m_; }
  double omega() const { return omega_; }
  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }

  // Power-basis coefficients c0..c3 of interval i in (t - t_i).
  std::array<double, 4> coefficients(std::size_t i) const {
    const double h = t_[i + 1] - t_[i];
    const double c0 = g_[i];
    const double c1 = (g_[i + 1] - g_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    const double c2 = 0.5 * m_[i];
    const double c3 = (m_[i + 1] - m_[i]) / (6.0 * h);
    return {c0, c1, c2, c3};
  }

  SplineSample eval(double t) const {
    if (!(t >= t_.front() && t <= t_.back())) throw InputError("SmoothingSpline::eval: t outside knot range");
    std::size_t i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
    i = i == 0 ? 0 : i - 1;
    if (i >= t_.size() - 1) i = t_.size() - 2;
    const auto c = coefficients(i);
    const double u = t - t_[i];
    return {c[0] + u * (c[1] + u * (c[2] + u * c[3])), c[1] + u * (2.0 * c[2] + 3.0 * u * c[3]),
            2.0 * c[2] + 6.0 * u * c[3]};
  }

  // Integral of f''(t)^2 over the knot range.
  double roughness() const {
    double r = 0.0;
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
      const double h = t_[i + 1] - t_[i];
      r += h / 3.0 * (m_[i] * m_[i] + m_[i] * m_[i + 1] + m_[i + 1] * m_[i + 1]);
    }
    return r;
  }

  double fitting_disagreement(const ElevationSeries& data) const {
    double s = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double r = data[k] - g_[k];
      s += r * r;
    }
    return s;
  }

 private:
  std::vector<double> t_;
  std::vector<double> g_;
  std::vector<double> m_;
  double omega_;
};

// Minimizes  omega * sum_k (delta_k - f(t_k))^2 + (1 - omega) * int f''^2 dt
// over cubic splines with knots at the samples, subject to f'(0) = 0.
//
// With f'(0) pinned the boundary variation at t = 0 vanishes, so the optimum
// leaves f''(0) free; only the right end carries the natural condition
// f''(t_end) = 0. The equality-constrained quadratic program is solved via its
// sparse KKT system.
inline SmoothingSpline fit_spline(const ElevationSeries& series, double omega) {
  detail::require(series.size() >= 4, "fit_spline: need at least 4 samples");
  detail::require(omega > 0.0 && omega < 1.0, "fit_spline: omega must be in (0,1)");
  const double lambda = (1.0 - omega) / omega;
  if (lambda > 1e12) throw NumericalError("fit_spline: omega too close to 0, constrained system is ill-conditioned");

  const int n = static_cast<int>(series.size());
  const double h = series.dt();
  const int ng = n;          // knot values g_0..g_{n-1}
  const int nm = n - 1;      // second derivatives m_0..m_{n-2}; m_{n-1} = 0
  const int nx = ng + nm;
  const int nc = n - 1;      // clamp row + (n-2) first-derivative continuity rows
  const int N = nx + nc;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(12 * n));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);

  for (int k = 0; k < n; ++k) {
    trip.emplace_back(k, k, 2.0);
    rhs[k] = 2.0 * series[static_cast<std::size_t>(k)];
  }
  // Roughness Hessian 2*lambda*R with R from int over each interval.
  for (int i = 0; i + 1 < n; ++i) {
    const double d = 2.0 * lambda * h / 3.0;
    const double o = 2.0 * lambda * h / 6.0;
    const int a = ng + i;
    const bool b_free = i + 1 < nm;
    const int b = ng + i + 1;
    trip.emplace_back(a, a, d);
    if (b_free) {
      trip.emplace_back(b, b, d);
      trip.emplace_back(a, b, o);
      trip.emplace_back(b, a, o);
    }
  }
  auto constraint = [&](int row, int col, double v) {
    trip.emplace_back(nx + row, col, v);
    trip.emplace_back(col, nx + row, v);
  };
  // f'(t_0) = (g1 - g0)/h - h (2 m0 + m1) / 6 = 0
  constraint(0, 0, -1.0 / h);
  constraint(0, 1, 1.0 / h);
  constraint(0, ng + 0, -h / 3.0);
  if (1 < nm) constraint(0, ng + 1, -h / 6.0);
  // Continuity of f' at interior knot i.
  for (int i = 1; i + 1 < n; ++i) {
    const int row = i;
    constraint(row, i - 1, 1.0 / h);
    constraint(row, i, -2.0 / h);
    constraint(row, i + 1, 1.0 / h);
    constraint(row, ng + i - 1, -h / 6.0);
    constraint(row, ng + i, -2.0 * h / 3.0);
    if (i + 1 < nm) constraint(row, ng + i + 1, -h / 6.0);
  }

  Eigen::SparseMatrix<double> K(N, N);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success) throw NumericalError("fit_spline: KKT factorization failed");
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite()) throw NumericalError("fit_spline: KKT solve failed");
  const double resid = (K * sol - rhs).norm();
  if (resid > 1e-8 * std::max(1.0, rhs.norm())) {
    throw NumericalError("fit_spline: KKT residual too large, system is ill-conditioned");
  }

  std::vector<double> t(static_cast<std::size_t>(n)), g(static_cast<std::size_t>(n)),
      m(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    t[static_cast<std::size_t>(k)] = series.time(static_cast<std::size_t>(k));
    g[static_cast<std::size_t>(k)] = sol[k];
  }
  for (int i = 0; i < nm; ++i) m[static_cast<std::size_t>(i)] = sol[ng + i];
  return SmoothingSpline(std::move(t), std::move(g), std::move(m), omega);
}

struct Kinematics {
  std::vector<double> elevation;
  std::vector<double> velocity;
  std::vector<double> acceleration;
};

// Spline-smoothed elevation, velocity and acceleration at every sample time.
inline Kinematics spline_kinematics(const ElevationSeries& series, double omega) {
  const SmoothingSpline spline = fit_spline(series, omega);
  Kinematics k;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const SplineSample s = spline.eval(series.time(i));
    k.elevation.push_back(s.value);
    k.velocity.push_back(s.velocity);
    k.acceleration.push_back(s.acceleration);
  }
  return k;
}

}  // namespace liftsim::kinematics
