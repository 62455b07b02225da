#include <doctest.h>

#include <cmath>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/fit_algebraic.hpp"
#include "ellipsefit/geometry.hpp"
#include "ellipsefit/harness.hpp"
#include "test_helpers.hpp"

using namespace ellipsefit;
using namespace ellipsefit::testing;

TEST_SUITE_BEGIN("fit_algebraic");

TEST_CASE("design rows") {
  PointSet ps;
  ps.points = {Point2(1, 2), Point2(0, 0), Point2(-1, 1)};
  const DesignSystem ds = build_design(ps);

  CHECK(ds.phi.row(0).isApprox(Eigen::RowVectorXd{{-3, 4, 2, 4, 1}}));
  CHECK(ds.rhs(0) == -4.0);
  CHECK(ds.phi.row(1).isApprox(Eigen::RowVectorXd{{0, 0, 0, 0, 1}}, 0));
  CHECK(ds.rhs(1) == 0.0);
  CHECK(ds.phi.row(2).isApprox(Eigen::RowVectorXd{{0, -2, -2, 2, 1}}));
  CHECK(ds.rhs(2) == -1.0);
}

TEST_CASE("noise-free recovery") {
  const GeometricEllipse truth{0, 0, 24, 12, 0};
  const PointSet ps = sample_parametric(truth, full_turn(36));
  const FitReport report = fit_als(ps);
  CHECK(std::abs(report.ellipse.a - 24.0) < 1e-8);
  CHECK(std::abs(report.ellipse.b - 12.0) < 1e-8);
  CHECK(std::abs(report.ellipse.xc) < 1e-8);
  CHECK(std::abs(report.ellipse.yc) < 1e-8);
  CHECK(angle_distance(report.ellipse.alpha, 0.0) < 1e-8);
  for (double r : report.residuals) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("five points interpolate") {
  Rng rng(23);
  const GeometricEllipse e = random_ellipse(rng);
  const double ts[] = {0.3, 1.1, 2.0, 3.5, 5.0};
  const PointSet ps = sample_parametric(e, ts);
  const FitReport report = fit_als(ps);
  for (double r : report.residuals) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("normal-equations optimality at the solution") {
  ScenarioConfig config;
  config.seed = 4242;
  const PointSet ps = generate(config);
  const DesignSystem ds = build_design(ps);
  const FitReport report = fit_als(ps);
  const Vector5 p = report.params.vec();

  const double base = (ds.phi * p - ds.rhs).squaredNorm();
  for (int j = 0; j < 5; ++j) {
    for (double s : {-1e-3, 1e-3}) {
      Vector5 q = p;
      q(j) += s;
      CHECK((ds.phi * q - ds.rhs).squaredNorm() >= base);
    }
  }

  // Central finite differences of G(p) = ||phi p - rhs||^2.
  const double scale = 1e-6 * (1.0 + (ds.phi.transpose() * ds.rhs).norm());
  for (int j = 0; j < 5; ++j) {
    const double h = 1e-6;
    Vector5 hi = p, lo = p;
    hi(j) += h;
    lo(j) -= h;
    const double g =
        ((ds.phi * hi - ds.rhs).squaredNorm() - (ds.phi * lo - ds.rhs).squaredNorm()) / (2 * h);
    CHECK(std::abs(g) < scale);
  }
}

TEST_CASE("degenerate data raises RankDeficient") {
  PointSet line;
  for (int i = 0; i < 8; ++i) line.points.emplace_back(i, 2.0 * i + 1.0);
  CHECK_THROWS_AS(fit_als(line), RankDeficient);

  PointSet repeated;
  repeated.points.assign(6, Point2(1.0, 2.0));
  CHECK_THROWS_AS(fit_als(repeated), RankDeficient);
}

TEST_CASE("hyperbolic data raises NotAnEllipse") {
  // x^2/4 - y^2 = 1; its conic has nonzero trace, so the reduced system is
  // well posed and the minimizer itself violates the ellipse condition.
  PointSet hyper;
  for (double s : {-1.2, -0.7, -0.2, 0.1, 0.4, 0.9, 1.3})
    hyper.points.emplace_back(2.0 * std::cosh(s), std::sinh(s));
  for (double s : {-1.0, -0.3, 0.6})
    hyper.points.emplace_back(-2.0 * std::cosh(s), std::sinh(s));
  CHECK_THROWS_AS(fit_als(hyper), NotAnEllipse);

  // On x^2 - y^2 = 1 the column x^2 - y^2 duplicates the constant column:
  // the trace-normalized representation cannot express that conic at all.
  PointSet unit_hyper;
  for (double s : {-1.2, -0.7, -0.2, 0.1, 0.4, 0.9, 1.3})
    unit_hyper.points.emplace_back(std::cosh(s), std::sinh(s));
  CHECK_THROWS_AS(fit_als(unit_hyper), RankDeficient);
}

TEST_CASE("preconditioning recovers far-offset data") {
  Rng rng(29);
  GeometricEllipse truth = random_ellipse(rng);
  truth.xc = 20000.0;
  truth.yc = -35000.0;
  const PointSet ps = sample_parametric(truth, full_turn(60));

  AlsOptions opt;
  opt.precondition = true;
  const FitReport report = fit_als(ps, opt);
  const GeometricEllipse t = canonicalize_geometric(truth);
  CHECK(std::abs(report.ellipse.a - t.a) < 1e-6);
  CHECK(std::abs(report.ellipse.b - t.b) < 1e-6);
  CHECK(std::abs(report.ellipse.xc - t.xc) < 1e-6);
  CHECK(std::abs(report.ellipse.yc - t.yc) < 1e-6);
}

TEST_CASE("shrinkage bias of the algebraic fit on the half arc") {
  ScenarioConfig config;
  config.seed = 777;
  double sum = 0.0;
  int count = 0;
  for (int t = 0; t < 200; ++t) {
    ScenarioConfig trial = config;
    trial.seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
    sum += fit_als(generate(trial)).ellipse.a;
    ++count;
  }
  CHECK(sum / count < 24.0);
}

TEST_CASE("fit_exact_5") {
  Rng rng(31);
  const GeometricEllipse e = random_ellipse(rng);
  const ReducedParams truth = ReducedParams::from_conic(geometric_to_conic(e));
  const double ts[] = {0.3, 1.1, 2.0, 3.5, 5.0};
  PointSet ps = sample_parametric(e, ts);

  const ReducedParams p = fit_exact_5(ps);
  CHECK((p.vec() - truth.vec()).norm() < 1e-8);
  for (const Point2& q : ps.points) CHECK(std::abs(algebraic_residual(p, q)) < 1e-9);

  SUBCASE("duplicates are singular") {
    ps.points[3] = ps.points[0];
    ps.points[4] = ps.points[1];
    CHECK_THROWS_AS(fit_exact_5(ps), SingularSystem);
  }

  SUBCASE("hyperbola points solve but convert as NotAnEllipse") {
    PointSet hyper;
    for (double s : {-1.0, -0.4, 0.2, 0.8, 1.4})
      hyper.points.emplace_back(2.0 * std::cosh(s), std::sinh(s));
    const ReducedParams ph = fit_exact_5(hyper);
    CHECK_FALSE(ph.to_conic().is_ellipse());
    CHECK_THROWS_AS(conic_to_geometric(ph.to_conic()), NotAnEllipse);

    // The trace-free hyperbola x^2 - y^2 = 1 is not representable with
    // a + c = 1, which the solver reports as a singular system.
    PointSet unit_hyper;
    for (double s : {-1.0, -0.4, 0.2, 0.8, 1.4})
      unit_hyper.points.emplace_back(std::cosh(s), std::sinh(s));
    CHECK_THROWS_AS(fit_exact_5(unit_hyper), SingularSystem);
  }

  SUBCASE("wrong cardinality is rejected") {
    ps.points.pop_back();
    CHECK_THROWS_AS(fit_exact_5(ps), std::invalid_argument);
  }
}

TEST_SUITE_END();
