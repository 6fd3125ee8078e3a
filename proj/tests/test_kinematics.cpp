#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "liftsim/kinematics/finite_difference.hpp"
#include "liftsim/kinematics/segmentation.hpp"
#include "liftsim/kinematics/smoothing_spline.hpp"

using namespace liftsim;
using namespace liftsim::kinematics;

namespace {

ElevationSeries sampled(double dt, int n, const std::function<double(double)>& f) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(f(k * dt));
  return ElevationSeries(dt, v);
}

}  // namespace

TEST(Units, PoundsAreExact) {
  EXPECT_DOUBLE_EQ(pounds_to_kg(1.0), 0.45359237);
  EXPECT_DOUBLE_EQ(kg_to_pounds(pounds_to_kg(275.0)), 275.0);
}

TEST(Series, RejectsInvalid) {
  EXPECT_THROW(ElevationSeries(0.1, {0, 1}), InputError);
  EXPECT_THROW(ElevationSeries(0.0, {0, 1, 2}), InputError);
  EXPECT_THROW(ElevationSeries(0.1, {0, std::nan(""), 2}), InputError);
}

TEST(Calibrate, Ratios) {
  EXPECT_DOUBLE_EQ(calibrate(220, 2.2).metres_per_pixel, 0.01);
  EXPECT_DOUBLE_EQ(calibrate(1, 1).metres_per_pixel, 1.0);
  EXPECT_DOUBLE_EQ(calibrate(220, 2.2).to_metres(150), 1.5);
  EXPECT_THROW(calibrate(0, 1), InputError);
  EXPECT_THROW(calibrate(10, -1), InputError);
}

TEST(Calibrate, ImageDownIsElevationDown) {
  const std::vector<double> dy{0, -10, -20};
  const auto s = elevation_from_pixels(dy, 0.04, calibrate(100, 1.0));
  EXPECT_DOUBLE_EQ(s[2], 0.2);
}

TEST(FiniteDifference, ConstantGivesZero) {
  const ElevationSeries s(0.1, {3, 3, 3, 3, 3});
  for (double v : fd_velocity(s)) EXPECT_EQ(v, 0.0);
}

TEST(FiniteDifference, LinearIsExactInside) {
  const auto s = sampled(0.1, 10, [](double t) { return 2.0 * t; });
  const auto v = fd_velocity(s);
  EXPECT_EQ(v[0], 0.0);
  for (int k = 1; k < 9; ++k) EXPECT_NEAR(v[k], 2.0, 1e-12);
  EXPECT_NEAR(v[9], 2.0, 1e-12);
}

TEST(FiniteDifference, QuadraticIsExactInside) {
  const double dt = 0.1;
  const auto s = sampled(dt, 12, [](double t) { return t * t; });
  const auto v = fd_velocity(s);
  for (int k = 1; k < 11; ++k) EXPECT_NEAR(v[k], 2.0 * k * dt, 1e-12);
}

TEST(FiniteDifference, AccelerationCases) {
  const double dt = 0.05;
  const std::vector<double> c(8, 1.7);
  for (double a : fd_acceleration(c, dt)) EXPECT_EQ(a, 0.0);
  std::vector<double> lin;
  for (int k = 0; k < 8; ++k) lin.push_back(3.0 * k * dt);
  for (double a : fd_acceleration(lin, dt)) EXPECT_NEAR(a, 3.0, 1e-12);
}

TEST(FiniteDifference, FreeFallRecoversGravity) {
  const double dt = 0.01, g = kStandardGravity;
  const auto s = sampled(dt, 40, [&](double t) { return 0.5 * g * t * t; });
  const auto v = fd_velocity(s);
  const auto a = fd_acceleration(v, dt);
  // Second central difference of a quadratic; rounding of order eps / dt^2.
  for (int k = 2; k < 38; ++k) EXPECT_NEAR(a[k], g, 2.0 / dt * 1e-12);
  // k = 0 uses the forward difference against the pinned v_0 = 0.
  EXPECT_NEAR(a[0], g, 1e-9);
}

TEST(FiniteDifference, RejectsShortInput) {
  const std::vector<double> v{1.0, 2.0};
  EXPECT_THROW(fd_acceleration(v, 0.1), InputError);
}

namespace {

// Independent tridiagonal (Thomas) solve used to build an interpolating
// spline oracle with f'(0) = 0 and f''(T) = 0.
std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

}  // namespace

TEST(SmoothingSpline, ConstantDataIsReproduced) {
  const ElevationSeries s(0.04, std::vector<double>(20, 0.7));
  const auto sp = fit_spline(s, 0.99);
  EXPECT_NEAR(sp.roughness(), 0.0, 1e-20);
  EXPECT_NEAR(sp.fitting_disagreement(s), 0.0, 1e-20);
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(sp.eval(k * 0.04).value, 0.7, 1e-12);
}

TEST(SmoothingSpline, InitialSlopeIsExactlyZero) {
  std::mt19937 rng(2);
  std::normal_distribution<double> n(0, 0.01);
  const auto s = sampled(0.04, 60, [&](double t) { return std::sin(3 * t) + n(rng); });
  const auto sp = fit_spline(s, 0.95);
  EXPECT_NEAR(sp.eval(0.0).velocity, 0.0, 1e-14);
}

TEST(SmoothingSpline, SlopedLineBendsToHonourConstraint) {
  const auto s = sampled(0.05, 30, [](double t) { return 0.3 + 1.5 * t; });
  const auto sp = fit_spline(s, 0.99);
  EXPECT_GT(sp.fitting_disagreement(s), 0.0);
  EXPECT_NEAR(sp.eval(0.0).velocity, 0.0, 1e-12);
}

TEST(SmoothingSpline, InterpolationLimitMatchesOracle) {
  const double dt = 0.05;
  const int n = 30;
  const auto f = [](double t) { return 0.4 * t * t - 0.1 * t * t * t; };
  const auto s = sampled(dt, n, f);
  const auto sp = fit_spline(s, 1.0 - 1e-10);
  // Interpolating cubic spline: unknowns m_0..m_{n-2} with m_{n-1} = 0, the
  // clamp row and n-2 continuity rows.
  const int nm = n - 1;
  std::vector<double> a(nm, 0.0), b(nm, 0.0), c(nm, 0.0), d(nm, 0.0);
  b[0] = dt / 3.0;
  c[0] = dt / 6.0;
  d[0] = (s[1] - s[0]) / dt;
  for (int i = 1; i < nm; ++i) {
    a[i] = dt / 6.0;
    b[i] = 2.0 * dt / 3.0;
    if (i + 1 < nm) c[i] = dt / 6.0;
    d[i] = (s[i + 1] - 2 * s[i] + s[i - 1]) / dt;
  }
  const auto m = thomas(a, b, c, d);
  for (int i = 0; i < nm; ++i) EXPECT_NEAR(sp.knot_second_derivatives()[i], m[i], 1e-5);
  for (int k = 0; k < n; ++k) EXPECT_NEAR(sp.knot_values()[k], s[k], 1e-6);
}

TEST(SmoothingSpline, KnotEvaluationMatchesCoefficients) {
  const auto s = sampled(0.04, 25, [](double t) { return std::cos(2 * t); });
  const auto sp = fit_spline(s, 0.9);
  for (std::size_t i = 0; i + 1 < sp.knots().size(); ++i) {
    const auto c = sp.coefficients(i);
    const auto e = sp.eval(sp.knots()[i]);
    EXPECT_DOUBLE_EQ(e.value, c[0]);
    EXPECT_DOUBLE_EQ(e.velocity, c[1]);
    EXPECT_DOUBLE_EQ(e.acceleration, 2 * c[2]);
  }
}

TEST(SmoothingSpline, IsTwiceContinuouslyDifferentiable) {
  const auto s = sampled(0.04, 25, [](double t) { return std::cos(2 * t) + 0.01 * std::sin(40 * t); });
  const auto sp = fit_spline(s, 0.7);
  for (std::size_t i = 1; i + 1 < sp.knots().size(); ++i) {
    const auto l = sp.coefficients(i - 1);
    const auto r = sp.coefficients(i);
    const double h = sp.knots()[i] - sp.knots()[i - 1];
    EXPECT_NEAR(l[0] + h * (l[1] + h * (l[2] + h * l[3])), r[0], 1e-12);
    EXPECT_NEAR(l[1] + h * (2 * l[2] + 3 * h * l[3]), r[1], 1e-10);
    EXPECT_NEAR(2 * l[2] + 6 * h * l[3], 2 * r[2], 1e-9);
  }
}

TEST(SmoothingSpline, AccelerationMatchesDenseSecondDifference) {
  const auto s = sampled(0.04, 30, [](double t) { return std::sin(2 * t) * t; });
  const auto sp = fit_spline(s, 0.95);
  const double h = 1e-4;
  for (double t = 0.01; t < sp.t_max() - 0.01; t += 0.0137) {
    const double fd = (sp.eval(t + h).value - 2 * sp.eval(t).value + sp.eval(t - h).value) / (h * h);
    EXPECT_NEAR(sp.eval(t).acceleration, fd, 1e-6 + 1e-6 * std::abs(fd)) << t;
  }
}

TEST(SmoothingSpline, RejectsOutOfRangeAndBadOmega) {
  const auto s = sampled(0.04, 10, [](double t) { return t; });
  const auto sp = fit_spline(s, 0.5);
  EXPECT_THROW(sp.eval(-0.01), InputError);
  EXPECT_THROW(sp.eval(sp.t_max() + 1e-9), InputError);
  EXPECT_THROW(fit_spline(s, 0.0), InputError);
  EXPECT_THROW(fit_spline(s, 1.0), InputError);
  EXPECT_THROW(fit_spline(ElevationSeries(0.1, {0, 1, 2}), 0.5), InputError);
  EXPECT_THROW(fit_spline(s, 1e-14), NumericalError);
}

TEST(SmoothingSpline, DisagreementNonIncreasingInOmega) {
  std::mt19937 rng(9);
  std::normal_distribution<double> n(0, 0.02);
  const auto s = sampled(0.04, 50, [&](double t) { return 0.5 * t * t + n(rng); });
  double prev = std::numeric_limits<double>::infinity();
  for (double om : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) {
    const double d = fit_spline(s, om).fitting_disagreement(s);
    EXPECT_LE(d, prev * (1 + 1e-9));
    prev = d;
  }
}

TEST(SmoothingSpline, QuadraticVelocityAwayFromRightEnd) {
  // The natural right end forces f''(T) = 0, so agreement is checked on the
  // first 40 % of a 4 s series at 25 Hz.
  const auto s = sampled(0.04, 100, [](double t) { return 0.9 * t * t; });
  const auto sp = fit_spline(s, 0.99);
  for (int k = 0; k <= 40; ++k) EXPECT_NEAR(sp.eval(k * 0.04).velocity, 1.8 * k * 0.04, 1e-5);
}

TEST(SmoothingSpline, CubicVelocityNearInterpolationLimit) {
  // A non-zero third derivative leaves a small residual at the clamped end.
  const auto f = [](double t) { return 0.3 * t * t - 0.05 * t * t * t; };
  const auto df = [](double t) { return 0.6 * t - 0.15 * t * t; };
  const auto sp = fit_spline(sampled(0.04, 100, f), 0.99999);
  for (int k = 0; k <= 50; ++k) EXPECT_NEAR(sp.eval(k * 0.04).velocity, df(k * 0.04), 1e-4);
}

TEST(SmoothingSpline, NaturalRightEndHasZeroCurvature) {
  const auto s = sampled(0.04, 50, [](double t) { return 1.25 * t * t; });
  const auto sp = fit_spline(s, 0.99);
  EXPECT_EQ(sp.eval(sp.t_max()).acceleration, 0.0);
}

TEST(Segmentation, SingleRamp) {
  std::vector<double> v(10, 0.0);
  for (int k = 0; k <= 25; ++k) v.push_back(0.5 * k / 25.0);
  for (int k = 0; k < 10; ++k) v.push_back(0.5);
  const auto segs = segment_concentric(ElevationSeries(0.04, v));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_LE(segs[0].start_index, 10u);
  EXPECT_GE(segs[0].end_index, 35u);
  EXPECT_NEAR(v[segs[0].end_index] - v[segs[0].start_index], 0.5, 1e-12);
}

TEST(Segmentation, ThreeRisesWithHoldsAndDescents) {
  const double dt = 0.04;
  std::vector<double> v;
  auto hold = [&](double secs) {
    const double y = v.empty() ? 0.0 : v.back();
    for (int k = 0; k < std::lround(secs / dt); ++k) v.push_back(y);
  };
  auto move = [&](double dy, double secs) {
    const double y = v.empty() ? 0.0 : v.back();
    const int n = static_cast<int>(std::lround(secs / dt));
    for (int k = 1; k <= n; ++k) v.push_back(y + dy * k / n);
  };
  hold(1.0);
  for (int r = 0; r < 3; ++r) {
    move(0.5, 1.0);
    hold(1.0);
    move(-0.5, 1.0);
    hold(1.0);
  }
  const auto segs = segment_concentric(ElevationSeries(dt, v));
  ASSERT_EQ(segs.size(), 3u);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    EXPECT_LT(segs[i].start_index, segs[i].end_index);
    EXPECT_NEAR(v[segs[i].end_index] - v[segs[i].start_index], 0.5, 1e-9);
    if (i > 0) EXPECT_GT(segs[i].start_index, segs[i - 1].end_index);
  }
}

TEST(Segmentation, DescentOnlyIsEmpty) {
  std::vector<double> v;
  for (int k = 0; k < 50; ++k) v.push_back(1.0 - 0.02 * k);
  EXPECT_TRUE(segment_concentric(ElevationSeries(0.04, v)).empty());
}

TEST(Segmentation, SegmentsAreDisjointAndOrdered) {
  std::mt19937 rng(4);
  std::normal_distribution<double> n(0, 0.002);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v;
    for (int k = 0; k < 400; ++k) v.push_back(0.3 * std::sin(0.05 * k * (1 + 0.1 * trial)) + n(rng));
    const auto segs = segment_concentric(ElevationSeries(0.04, v));
    for (std::size_t i = 0; i < segs.size(); ++i) {
      EXPECT_LT(segs[i].start_index, segs[i].end_index);
      if (i > 0) EXPECT_GT(segs[i].start_index, segs[i - 1].end_index);
    }
  }
}
