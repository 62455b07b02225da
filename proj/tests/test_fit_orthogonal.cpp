#include <doctest.h>

#include <cmath>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/fit_algebraic.hpp"
#include "ellipsefit/fit_orthogonal.hpp"
#include "ellipsefit/geometry.hpp"
#include "ellipsefit/harness.hpp"
#include "test_helpers.hpp"

using namespace ellipsefit;
using namespace ellipsefit::testing;

TEST_SUITE_BEGIN("fit_orthogonal");

TEST_CASE("foot point on the axes") {
  const FootPoint major = foot_point(2, 1, Point2(3, 0));
  CHECK(major.foot.isApprox(Point2(2, 0), 1e-9));
  CHECK(major.distance.norm() == doctest::Approx(1.0));

  const FootPoint minor = foot_point(2, 1, Point2(0, 3));
  CHECK(minor.foot.isApprox(Point2(0, 1), 1e-9));
  CHECK(minor.distance.norm() == doctest::Approx(2.0));

  const FootPoint center = foot_point(2, 1, Point2(0, 0));
  CHECK(center.foot == Point2(2, 0));
}

TEST_CASE("boundary points are fixed points") {
  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0.5, 10.0);
    const double b = rng.uniform(0.2, 1.0) * a;
    const double t = rng.uniform(0.0, 2 * kPi);
    const Point2 on_curve(a * std::cos(t), b * std::sin(t));
    const FootPoint fp = foot_point(a, b, on_curve);
    CHECK(fp.distance.norm() < 1e-9);
  }
}

TEST_CASE("foot point against the dense-search oracle") {
  const GeometricEllipse e{0, 0, 2, 1, 0};
  const FootPoint fp = foot_point(2, 1, Point2(1.5, 0.8));
  const double oracle = dense_search_distance(e, Point2(1.5, 0.8), 100000);
  CHECK(fp.distance.norm() <= oracle + 1e-6);

  Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    const double a = rng.uniform(0.5, 8.0);
    const double b = rng.uniform(0.1, 1.0) * a;
    const Point2 p(rng.uniform(-3 * a, 3 * a), rng.uniform(-3 * a, 3 * a));
    const FootPoint got = foot_point(a, b, p);
    const double best = dense_search_distance({0, 0, a, b, 0}, p, 100000);
    CHECK(got.distance.norm() <= best + 1e-6);
    CHECK(got.distance.norm() >= best - 1e-6);
  }
}

TEST_CASE("converged feet satisfy both conditions") {
  Rng rng(43);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform(0.5, 10.0);
    const double b = rng.uniform(0.1, 1.0) * a;
    const Point2 p(rng.uniform(-3 * a, 3 * a), rng.uniform(-3 * a, 3 * a));
    if (p.norm() < 1e-6) continue;
    const FootPoint fp = foot_point(a, b, p);
    const double x = fp.foot.x(), y = fp.foot.y();
    const double f1 = 0.5 * (a * a * y * y + b * b * x * x - a * a * b * b);
    const double f2 = b * b * x * (p.y() - y) - a * a * y * (p.x() - x);
    CHECK(std::abs(f1) < 1e-9 * a * a * b * b);
    CHECK(std::abs(f2) < 1e-9 * (a * a + b * b) * p.norm());
  }
}

TEST_CASE("initializer candidates") {
  Rng rng(47);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform(0.5, 10.0);
    const double b = rng.uniform(0.1, 1.0) * a;
    Point2 p(rng.uniform(-2 * a, 2 * a), rng.uniform(-2 * a, 2 * a));
    if (p.norm() == 0.0) continue;
    const auto [k1, k2] = foot_initial_candidates(a, b, p);

    // The radial candidate always lies on the ellipse.
    const double f1 =
        0.5 * (a * a * k1.y() * k1.y() + b * b * k1.x() * k1.x() - a * a * b * b);
    CHECK(std::abs(f1) < 1e-12 * a * a * b * b);

    if (std::abs(p.x()) < a) {
      CHECK(k2.x() == p.x());
      const double expect_y = (p.y() >= 0 ? 1.0 : -1.0) * (b / a) *
                              std::sqrt(a * a - p.x() * p.x());
      CHECK(k2.y() == doctest::Approx(expect_y));
    } else {
      CHECK(k2.x() == (p.x() >= 0 ? a : -a));
      CHECK(k2.y() == 0.0);
    }
  }
}

TEST_CASE("parameter Jacobian matches central finite differences") {
  Rng rng(53);
  for (int i = 0; i < 100; ++i) {
    GeometricEllipse q = random_ellipse(rng);
    const double t = rng.uniform(0.0, 2 * kPi);
    const double reach = std::min(0.4 * q.b * q.b / q.a, 0.4 * q.b);
    const double s = rng.uniform() < 0.5 ? rng.uniform(-reach, -0.01 * q.b)
                                         : rng.uniform(0.01 * q.b, 1.5 * q.a);
    const Point2 xi = offset_point(q, t, s);

    const Eigen::Matrix<double, 2, 5> analytic = project_orthogonal(q, xi).jacobian;
    const Eigen::Matrix<double, 2, 5> numeric = fd_foot_jacobian(q, xi);
    const double rel = (analytic - numeric).norm() / std::max(1.0, analytic.norm());
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("noise-free fit recovers the generator") {
  const GeometricEllipse truth{1.5, -2.0, 24, 12, 0.4};
  const PointSet ps = sample_parametric(truth, full_turn(36));

  GeometricEllipse q0 = truth;
  q0.xc += 0.5;
  q0.a *= 1.05;
  q0.b *= 0.95;
  q0.alpha += 0.03;
  const FitReport report = fit_ols(ps, q0);
  CHECK(report.converged);
  CHECK(std::abs(report.ellipse.a - truth.a) < 1e-8);
  CHECK(std::abs(report.ellipse.b - truth.b) < 1e-8);
  CHECK(std::abs(report.ellipse.xc - truth.xc) < 1e-8);
  CHECK(std::abs(report.ellipse.yc - truth.yc) < 1e-8);
  CHECK(angle_distance(report.ellipse.alpha, truth.alpha) < 1e-8);
}

TEST_CASE("exact initial value is already stationary") {
  const GeometricEllipse truth{0, 0, 24, 12, 0.7};
  const PointSet ps = sample_parametric(truth, full_turn(40));
  const FitReport report = fit_ols(ps, truth);
  CHECK(report.converged);
  CHECK(report.iterations == 0);
  CHECK(std::abs(report.ellipse.a - truth.a) < 1e-9);
  CHECK(std::abs(report.ellipse.b - truth.b) < 1e-9);
}

TEST_CASE("objective trace is non-increasing") {
  ScenarioConfig config;
  config.seed = 99;
  const PointSet ps = generate(config);
  const FitReport init = fit_als(ps);
  const FitReport report = fit_ols(ps, init.ellipse);
  REQUIRE(report.objective_trace.size() >= 2);
  // Non-increasing up to the rounding noise band of the polish steps.
  for (std::size_t i = 1; i < report.objective_trace.size(); ++i)
    CHECK(report.objective_trace[i] <=
          report.objective_trace[i - 1] * (1.0 + 1e-12));
  CHECK(report.residuals.size() == ps.size());
}

TEST_CASE("rigid-motion equivariance") {
  ScenarioConfig config;
  config.seed = 1234;
  config.noise_sigma2 = 0.1;
  const PointSet ps = generate(config);

  const FitReport base = fit_ols(ps, fit_als(ps).ellipse);

  Rng rng(59);
  for (int i = 0; i < 10; ++i) {
    const double theta = rng.uniform(0.0, 2 * kPi);
    const Point2 shift(rng.uniform(-20, 20), rng.uniform(-20, 20));
    Eigen::Matrix2d rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);

    PointSet moved;
    moved.points.reserve(ps.size());
    for (const Point2& p : ps.points) moved.points.push_back(rot * p + shift);

    const FitReport fit = fit_ols(moved, fit_als(moved).ellipse);
    GeometricEllipse back = fit.ellipse;
    const Point2 c = rot.transpose() * (Point2(back.xc, back.yc) - shift);
    back.xc = c.x();
    back.yc = c.y();
    back.alpha -= theta;
    back = canonicalize_geometric(back);

    CHECK(std::abs(back.a - base.ellipse.a) < 1e-6);
    CHECK(std::abs(back.b - base.ellipse.b) < 1e-6);
    CHECK(std::abs(back.xc - base.ellipse.xc) < 1e-6);
    CHECK(std::abs(back.yc - base.ellipse.yc) < 1e-6);
    CHECK(angle_distance(back.alpha, base.ellipse.alpha) < 1e-6);
  }
}

TEST_CASE("error paths") {
  const GeometricEllipse truth{0, 0, 4, 2, 0};
  const PointSet ps = sample_parametric(truth, full_turn(12));

  CHECK_THROWS_AS(fit_ols(ps, {0, 0, -1, 2, 0}), BadInitial);
  CHECK_THROWS_AS(fit_ols(ps, {0, 0, 4, 0, 0}), BadInitial);

  // Five copies of one point: every Jacobian block is identical, so the
  // stacked system cannot determine five parameters.
  PointSet repeated;
  repeated.points.assign(5, Point2(5.0, 0.5));
  CHECK_THROWS_AS(fit_ols(repeated, {0, 0, 4, 2, 0}), DegenerateStep);
}

TEST_SUITE_END();
