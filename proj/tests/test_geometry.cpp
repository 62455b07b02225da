#include <doctest.h>

#include <cmath>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/geometry.hpp"
#include "test_helpers.hpp"

using namespace ellipsefit;
using namespace ellipsefit::testing;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("parametric sampling matches the closed form") {
  const double ts1[] = {0.0};
  CHECK(sample_parametric({0, 0, 1, 1, 0}, ts1).points[0].isApprox(Point2(1, 0), 1e-15));

  const double ts2[] = {kPi / 2};
  const Point2 p2 = sample_parametric({0, 0, 24, 12, 0}, ts2).points[0];
  CHECK(p2.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p2.y() == doctest::Approx(12.0));

  // Hand-evaluated: x = 1 + 2 cos0 cos(pi/2) - 1 sin0 sin(pi/2) = 1,
  //                 y = 2 + 2 cos0 sin(pi/2) + 1 sin0 cos(pi/2) = 4.
  const double ts3[] = {0.0};
  const Point2 p3 = sample_parametric({1, 2, 2, 1, kPi / 2}, ts3).points[0];
  CHECK(p3.x() == doctest::Approx(1.0));
  CHECK(p3.y() == doctest::Approx(4.0));
}

TEST_CASE("frame transforms") {
  const RotationFrame identity = RotationFrame::from_angle(0.0, Point2(0, 0));
  CHECK(to_canonical(identity, Point2(3, 4)).isApprox(Point2(3, 4), 1e-15));

  const RotationFrame quarter = RotationFrame::from_angle(kPi / 2, Point2(0, 0));
  const Point2 q = to_canonical(quarter, Point2(1, 0));
  CHECK(q.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q.y() == doctest::Approx(-1.0));

  CHECK(identity.is_valid());
  CHECK(quarter.is_valid());

  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const RotationFrame frame =
        RotationFrame::from_angle(rng.uniform(-10, 10), Point2(rng.uniform(-5, 5), rng.uniform(-5, 5)));
    REQUIRE(frame.is_valid());
    const Point2 x(rng.uniform(-100, 100), rng.uniform(-100, 100));
    CHECK((from_canonical(frame, to_canonical(frame, x)) - x).norm() < 1e-12);
  }
}

TEST_CASE("geometric_to_conic on known shapes") {
  const ConicCoefficients circle = geometric_to_conic({0, 0, 1, 1, 0});
  CHECK(circle.a == doctest::Approx(0.5));
  CHECK(circle.b == doctest::Approx(0.0));
  CHECK(circle.c == doctest::Approx(0.5));
  CHECK(circle.f == doctest::Approx(-0.5));

  const ConicCoefficients k = geometric_to_conic({0, 0, 24, 12, 0});
  CHECK(k.a == doctest::Approx(0.2));
  CHECK(k.b == doctest::Approx(0.0));
  CHECK(k.c == doctest::Approx(0.8));
  CHECK(k.d == doctest::Approx(0.0));
  CHECK(k.e == doctest::Approx(0.0));
  CHECK(k.f == doctest::Approx(-115.2));

  for (double t : full_turn(36)) {
    const double tv[] = {t};
    const Point2 p = sample_parametric({0, 0, 24, 12, 0}, tv).points[0];
    CHECK(std::abs(k.evaluate(p)) < 1e-9);
  }
}

TEST_CASE("conic_to_geometric on known shapes") {
  const GeometricEllipse circle = conic_to_geometric({0.5, 0, 0.5, 0, 0, -0.5});
  CHECK(circle.a == doctest::Approx(1.0));
  CHECK(circle.b == doctest::Approx(1.0));
  CHECK(circle.alpha == 0.0);

  const GeometricEllipse e = conic_to_geometric({0.2, 0, 0.8, 0, 0, -115.2});
  CHECK(e.xc == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(e.yc == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(e.a == doctest::Approx(24.0));
  CHECK(e.b == doctest::Approx(12.0));
  CHECK(angle_distance(e.alpha, 0.0) < 1e-9);

  CHECK_THROWS_AS(conic_to_geometric({1, 0, -1, 0, 0, -1}), NotAnEllipse);
  // Imaginary locus: x^2 + y^2 + 1 = 0.
  CHECK_THROWS_AS(conic_to_geometric({0.5, 0, 0.5, 0, 0, 0.5}), DegenerateConic);
}

TEST_CASE("geometric <-> conic round trip over random ellipses") {
  Rng rng(11);
  EllipseRanges ranges;
  ranges.axis_min = 0.5;
  ranges.axis_max = 100.0;
  ranges.ecc_max = 0.999;
  for (int i = 0; i < 1000; ++i) {
    const GeometricEllipse e = canonicalize_geometric(random_ellipse(rng, ranges));
    const GeometricEllipse back = canonicalize_geometric(conic_to_geometric(geometric_to_conic(e)));
    CHECK(std::abs(back.a - e.a) < 1e-9);
    CHECK(std::abs(back.b - e.b) < 1e-9);
    CHECK(std::abs(back.xc - e.xc) < 1e-9);
    CHECK(std::abs(back.yc - e.yc) < 1e-9);
    if (e.a - e.b > 1e-3) CHECK(angle_distance(back.alpha, e.alpha) < 1e-9);
  }
}

TEST_CASE("sampled boundary satisfies the converted conic") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const GeometricEllipse e = random_ellipse(rng);
    const ConicCoefficients k = geometric_to_conic(e);
    for (double t : full_turn(36)) {
      const double tv[] = {t};
      CHECK(std::abs(k.evaluate(sample_parametric(e, tv).points[0])) < 1e-9);
    }
  }
}

TEST_CASE("algebraic_residual of the reduced conic") {
  const ReducedParams unit_circle{0.5, 0, 0, 0, -0.5};
  CHECK(algebraic_residual(unit_circle, Point2(1, 0)) == doctest::Approx(0.0));
  CHECK(algebraic_residual(unit_circle, Point2(2, 0)) == doctest::Approx(1.5));

  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    const GeometricEllipse e = random_ellipse(rng);
    const ReducedParams p = ReducedParams::from_conic(geometric_to_conic(e));
    for (double t : full_turn(360)) {
      const double tv[] = {t};
      CHECK(std::abs(algebraic_residual(p, sample_parametric(e, tv).points[0])) < 1e-9);
    }
  }
}

TEST_CASE("canonicalize_geometric") {
  const GeometricEllipse swapped = canonicalize_geometric({0, 0, 12, 24, 0});
  CHECK(swapped.a == 24.0);
  CHECK(swapped.b == 12.0);
  CHECK(swapped.alpha == doctest::Approx(kPi / 2));

  // A rotation of 3.14159 is a hair under pi; under the half-turn symmetry it
  // is equivalent to zero.
  const GeometricEllipse near_pi = canonicalize_geometric({0, 0, 24, 12, 3.14159});
  CHECK(angle_distance(near_pi.alpha, 0.0) < 1e-5);

  const GeometricEllipse negative = canonicalize_geometric({0, 0, 24, 12, -0.1});
  CHECK(negative.alpha == doctest::Approx(kPi - 0.1));

  Rng rng(19);
  for (int i = 0; i < 500; ++i) {
    GeometricEllipse e = random_ellipse(rng);
    e.alpha = rng.uniform(-20.0, 20.0);
    if (rng.uniform() < 0.5) std::swap(e.a, e.b);
    const GeometricEllipse once = canonicalize_geometric(e);
    const GeometricEllipse twice = canonicalize_geometric(once);
    CHECK(once.a >= once.b);
    CHECK(once.alpha >= 0.0);
    CHECK(once.alpha < kPi);
    CHECK(twice.a == once.a);
    CHECK(twice.b == once.b);
    CHECK(twice.alpha == once.alpha);
  }
}

TEST_CASE("conic normalizations and the ellipse test") {
  const ConicCoefficients k{2, 0, 2, 0, 0, -2};
  const ConicCoefficients t = k.normalized_trace();
  CHECK(t.a + t.c == doctest::Approx(1.0));
  const ConicCoefficients n = k.normalized_norm();
  CHECK(n.a * n.a + n.b * n.b + n.c * n.c + n.d * n.d + n.e * n.e + n.f * n.f ==
        doctest::Approx(1.0));
  const ConicCoefficients fobj = k.normalized_f();
  CHECK(fobj.f == doctest::Approx(1.0));

  CHECK(k.is_ellipse());
  CHECK_FALSE(ConicCoefficients{1, 0, -1, 0, 0, -1}.is_ellipse());
  // Within the degeneracy band around b^2 - ac = 0.
  CHECK_FALSE(ConicCoefficients{0.5, 0.5 - 1e-14, 0.5, 0, 0, -0.5}.is_ellipse());
}

TEST_SUITE_END();
