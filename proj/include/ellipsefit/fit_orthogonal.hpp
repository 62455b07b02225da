#pragma once

#include <utility>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

/// Nearest point on an axis-aligned ellipse together with the residual vector.
struct FootPoint {
  Point2 foot = Point2::Zero();      // on the ellipse, same frame as the query
  Point2 distance = Point2::Zero();  // query - foot
  int iterations = 0;
};

struct FootOptions {
  int max_iterations = 50;
  double step_tol = 1e-12;  // absolute tolerance is step_tol * (1 + a)
};

/// Orthogonal projection onto X^2/a^2 + Y^2/b^2 = 1 by Gauss-Newton on the
/// on-curve condition f1 and the normality condition f2. A query at the exact
/// center deterministically projects to the major vertex on the +X side.
/// Throws NoConvergence and SingularJacobian.
FootPoint foot_point(double a, double b, const Point2& point, const FootOptions& options = {});

/// The two initializer candidates averaged into the starting value: the radial
/// projection through the center and the coordinate-line projection.
std::pair<Point2, Point2> foot_initial_candidates(double a, double b, const Point2& point);

/// World-frame orthogonal projection against a general ellipse plus the 2x5
/// Jacobian of the foot with respect to q = (xc, yc, a, b, alpha).
struct OrthogonalProjection {
  Point2 foot = Point2::Zero();      // world frame
  Point2 distance = Point2::Zero();  // measurement - foot
  Eigen::Matrix<double, 2, 5> jacobian = Eigen::Matrix<double, 2, 5>::Zero();
  int foot_iterations = 0;
};

OrthogonalProjection project_orthogonal(const GeometricEllipse& e, const Point2& measurement,
                                        const FootOptions& options = {});

struct OlsOptions {
  int max_outer = 100;
  int max_halvings = 12;
  double stationarity_tol = 1e-8;  // on ||J^T d|| relative to 1 + ||d||
  double min_step = 1e-10;         // full GN step below min_step * (1 + ||q||) stops
  FootOptions foot;
};

/// Orthogonal-distance fit: Gauss-Newton over the geometric parameters with a
/// backtracking step size, foot points recomputed each iterate. The report
/// carries per-point orthogonal distances and the sum-of-squares trajectory.
/// Throws BadInitial, DegenerateStep, NoConvergence.
FitReport fit_ols(const PointSet& points, const GeometricEllipse& initial,
                  const OlsOptions& options = {});

}  // namespace ellipsefit
