#pragma once

#include <span>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

/// Samples the parametric form
///   x(t) = xc + a cos t cos alpha - b sin t sin alpha
///   y(t) = yc + a cos t sin alpha + b sin t cos alpha.
PointSet sample_parametric(const GeometricEllipse& e, std::span<const double> t_values);

/// X = R (x - xc)
Point2 to_canonical(const RotationFrame& frame, const Point2& p);

/// x = R^-1 X + xc
Point2 from_canonical(const RotationFrame& frame, const Point2& p);

/// Expands the axis-aligned form through the frame transform; result is
/// trace-normalized (a + c = 1).
ConicCoefficients geometric_to_conic(const GeometricEllipse& e);

/// Center, axes and rotation of an ellipse conic. Result is canonical.
/// Throws NotAnEllipse when b^2 - ac >= -1e-12 after trace normalization and
/// DegenerateConic when the conic has no real locus.
GeometricEllipse conic_to_geometric(const ConicCoefficients& conic);

/// C(x,y) = a (x^2 - y^2) + 2b xy + 2d x + 2e y + y^2 + f.
double algebraic_residual(const ReducedParams& p, const Point2& point);

/// Enforces a >= b (axis swap shifts alpha by pi/2) and alpha in [0, pi).
/// Circles report alpha = 0. Idempotent.
GeometricEllipse canonicalize_geometric(const GeometricEllipse& e);

/// Distance between two axis angles under the half-turn symmetry, in [0, pi/2].
double angle_distance(double alpha1, double alpha2);

}  // namespace ellipsefit
