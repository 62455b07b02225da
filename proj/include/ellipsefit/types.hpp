#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ellipsefit {

using Point2 = Eigen::Vector2d;
using Vector5 = Eigen::Matrix<double, 5, 1>;

/// Ordered 2-D measurements with an optional per-point outlier flag.
struct PointSet {
  std::vector<Point2> points;
  std::vector<std::uint8_t> labels;  // empty, or one entry per point; 1 marks an outlier

  std::size_t size() const { return points.size(); }
  bool has_labels() const { return !labels.empty(); }
};

/// Coefficients of C(x,y) = a x^2 + 2b xy + c y^2 + 2d x + 2e y + f.
/// The representation is scale-equivalent; comparisons normalize to a+c=1 first.
struct ConicCoefficients {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;

  double evaluate(const Point2& p) const;
  ConicCoefficients scaled(double s) const;

  ConicCoefficients normalized_trace() const;  // a + c = 1
  ConicCoefficients normalized_norm() const;   // coefficient 6-vector of unit norm
  ConicCoefficients normalized_f() const;      // f = 1

  /// b^2 - ac < -tol after trace normalization.
  bool is_ellipse(double tol = 1e-12) const;
};

/// Center, semi-axes and rotation angle between the x-axis and the semi-major axis.
/// Canonical form keeps a >= b > 0 and alpha in [0, pi).
struct GeometricEllipse {
  double xc = 0, yc = 0;
  double a = 1, b = 1;
  double alpha = 0;
};

/// Rotation and center mapping world coordinates into the axis-aligned frame.
struct RotationFrame {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  Point2 center = Point2::Zero();

  static RotationFrame from_angle(double alpha, const Point2& center);
  static RotationFrame of(const GeometricEllipse& e);

  /// Orthonormal with determinant +1 within tol.
  bool is_valid(double tol = 1e-12) const;
};

/// Reduced parameter vector p = (a, b, d, e, f) of the a+c=1 normalized conic.
struct ReducedParams {
  double a = 0, b = 0, d = 0, e = 0, f = 0;

  ConicCoefficients to_conic() const;  // (a, b, 1-a, d, e, f)
  static ReducedParams from_conic(const ConicCoefficients& conic);

  Vector5 vec() const;
  static ReducedParams from_vec(const Vector5& v);
};

/// Fit outcome: the estimate plus per-point residuals and iteration metadata.
struct FitReport {
  GeometricEllipse ellipse;
  ReducedParams params;
  std::vector<double> residuals;        // per point; meaning depends on the method
  std::vector<double> weights;          // final per-point weights where the method uses them
  std::vector<double> objective_trace;  // objective value per accepted iterate
  int iterations = 0;
  bool converged = true;
};

}  // namespace ellipsefit
