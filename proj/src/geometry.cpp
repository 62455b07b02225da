#include "ellipsefit/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ellipsefit/errors.hpp"

namespace ellipsefit {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEllipseTol = 1e-12;
}  // namespace

double ConicCoefficients::evaluate(const Point2& p) const {
  const double x = p.x(), y = p.y();
  return a * x * x + 2.0 * b * x * y + c * y * y + 2.0 * d * x + 2.0 * e * y + f;
}

ConicCoefficients ConicCoefficients::scaled(double s) const {
  return {a * s, b * s, c * s, d * s, e * s, f * s};
}

ConicCoefficients ConicCoefficients::normalized_trace() const {
  const double t = a + c;
  if (t == 0.0) throw NotAnEllipse("conic trace is zero; cannot normalize a+c=1");
  return scaled(1.0 / t);
}

ConicCoefficients ConicCoefficients::normalized_norm() const {
  const double n = std::sqrt(a * a + b * b + c * c + d * d + e * e + f * f);
  if (n == 0.0) throw std::invalid_argument("zero conic");
  return scaled(1.0 / n);
}

ConicCoefficients ConicCoefficients::normalized_f() const {
  if (f == 0.0) throw std::invalid_argument("conic with f = 0; cannot normalize f=1");
  return scaled(1.0 / f);
}

bool ConicCoefficients::is_ellipse(double tol) const {
  const double t = a + c;
  if (t == 0.0) return false;  // a = -c makes b^2 - ac = b^2 + a^2 >= 0
  const double an = a / t, bn = b / t, cn = c / t;
  return bn * bn - an * cn < -tol;
}

RotationFrame RotationFrame::from_angle(double alpha, const Point2& center) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  RotationFrame frame;
  frame.rotation << c, s, -s, c;
  frame.center = center;
  return frame;
}

RotationFrame RotationFrame::of(const GeometricEllipse& e) {
  return from_angle(e.alpha, Point2(e.xc, e.yc));
}

bool RotationFrame::is_valid(double tol) const {
  if (!center.allFinite() || !rotation.allFinite()) return false;
  const Eigen::Matrix2d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

ConicCoefficients ReducedParams::to_conic() const {
  return {a, b, 1.0 - a, d, e, f};
}

ReducedParams ReducedParams::from_conic(const ConicCoefficients& conic) {
  const ConicCoefficients k = conic.normalized_trace();
  return {k.a, k.b, k.d, k.e, k.f};
}

Vector5 ReducedParams::vec() const {
  Vector5 v;
  v << a, b, d, e, f;
  return v;
}

ReducedParams ReducedParams::from_vec(const Vector5& v) {
  return {v(0), v(1), v(2), v(3), v(4)};
}

PointSet sample_parametric(const GeometricEllipse& e, std::span<const double> t_values) {
  const double ca = std::cos(e.alpha), sa = std::sin(e.alpha);
  PointSet out;
  out.points.reserve(t_values.size());
  for (double t : t_values) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite parameter value");
    const double ct = std::cos(t), st = std::sin(t);
    out.points.emplace_back(e.xc + e.a * ct * ca - e.b * st * sa,
                            e.yc + e.a * ct * sa + e.b * st * ca);
  }
  return out;
}

Point2 to_canonical(const RotationFrame& frame, const Point2& p) {
  return frame.rotation * (p - frame.center);
}

Point2 from_canonical(const RotationFrame& frame, const Point2& p) {
  return frame.rotation.transpose() * p + frame.center;
}

ConicCoefficients geometric_to_conic(const GeometricEllipse& e) {
  const double C = std::cos(e.alpha), S = std::sin(e.alpha);
  const double a2 = e.a * e.a, b2 = e.b * e.b;

  // b^2 X^2 + a^2 Y^2 = a^2 b^2 expanded through X = R (x - xc).
  const double qa = b2 * C * C + a2 * S * S;
  const double qb = C * S * (b2 - a2);  // half the xy coefficient
  const double qc = b2 * S * S + a2 * C * C;
  const double qd = -(qa * e.xc + qb * e.yc);
  const double qe = -(qb * e.xc + qc * e.yc);
  const double qf =
      qa * e.xc * e.xc + 2.0 * qb * e.xc * e.yc + qc * e.yc * e.yc - a2 * b2;

  return ConicCoefficients{qa, qb, qc, qd, qe, qf}.normalized_trace();
}

GeometricEllipse conic_to_geometric(const ConicCoefficients& conic) {
  const double trace = conic.a + conic.c;
  const double mag = std::max({std::abs(conic.a), std::abs(conic.b), std::abs(conic.c)});
  if (mag == 0.0 || std::abs(trace) < 1e-15 * mag)
    throw NotAnEllipse("quadratic part has (near) zero trace");

  const ConicCoefficients k = conic.scaled(1.0 / trace);
  const double disc = k.b * k.b - k.a * k.c;
  if (!(disc < -kEllipseTol)) throw NotAnEllipse("ellipse condition b^2 - ac < 0 violated");

  const double det = -disc;  // ac - b^2 > 0
  const double xc = (k.b * k.e - k.c * k.d) / det;
  const double yc = (k.b * k.d - k.a * k.e) / det;

  // Conic value at the center; negative for a real ellipse.
  const double fc = k.f + k.d * xc + k.e * yc;
  if (!(fc < 0.0)) throw DegenerateConic("conic has no real locus");

  // Eigenvalues of [[a, b], [b, c]] with trace 1; the smaller one carries the
  // semi-major axis. lmin via the product avoids cancellation at high
  // eccentricity.
  const double gap = std::sqrt(std::max(0.0, 1.0 - 4.0 * det));
  const double lmax = 0.5 * (1.0 + gap);
  const double lmin = det / lmax;

  GeometricEllipse out;
  out.xc = xc;
  out.yc = yc;

  if (gap < 1e-14) {  // circle: rotation unidentifiable, report alpha = 0
    const double r = std::sqrt(-fc / lmax);
    out.a = out.b = r;
    out.alpha = 0.0;
    return out;
  }

  out.a = std::sqrt(-fc / lmin);
  out.b = std::sqrt(-fc / lmax);

  // atan2(2b, a-c) is twice the minor-axis angle; the quarter turn moves it to
  // the major axis, canonicalization folds it into [0, pi).
  out.alpha = 0.5 * std::atan2(2.0 * k.b, k.a - k.c) + kPi / 2.0;
  return canonicalize_geometric(out);
}

double algebraic_residual(const ReducedParams& p, const Point2& point) {
  const double x = point.x(), y = point.y();
  return p.a * (x * x - y * y) + 2.0 * p.b * x * y + 2.0 * p.d * x + 2.0 * p.e * y +
         y * y + p.f;
}

GeometricEllipse canonicalize_geometric(const GeometricEllipse& e) {
  GeometricEllipse out = e;
  if (out.b > out.a) {
    std::swap(out.a, out.b);
    out.alpha += kPi / 2.0;
  }
  out.alpha = std::fmod(out.alpha, kPi);
  if (out.alpha < 0.0) out.alpha += kPi;
  if (out.alpha >= kPi) out.alpha -= kPi;  // guard against fmod landing on pi
  if (out.a == out.b) out.alpha = 0.0;
  return out;
}

double angle_distance(double alpha1, double alpha2) {
  double d = std::fmod(std::abs(alpha1 - alpha2), kPi);
  return std::min(d, kPi - d);
}

}  // namespace ellipsefit
