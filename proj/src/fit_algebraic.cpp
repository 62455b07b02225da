#include "ellipsefit/fit_algebraic.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/geometry.hpp"

namespace ellipsefit {

namespace {

constexpr double kRankTol = 1e-10;

void require_points(const PointSet& points, std::size_t min_count) {
  if (points.size() < min_count)
    throw std::invalid_argument("need at least " + std::to_string(min_count) + " points");
  for (const Point2& p : points.points)
    if (!p.allFinite()) throw std::invalid_argument("non-finite coordinates");
}

/// Conic of the normalized frame u = s (x - cx), v = s (y - cy), mapped back to x, y.
ConicCoefficients unshift_conic(const ConicCoefficients& k, double s, double cx, double cy) {
  ConicCoefficients out;
  out.a = k.a * s * s;
  out.b = k.b * s * s;
  out.c = k.c * s * s;
  out.d = s * (k.d - s * (k.a * cx + k.b * cy));
  out.e = s * (k.e - s * (k.b * cx + k.c * cy));
  out.f = s * s * (k.a * cx * cx + 2.0 * k.b * cx * cy + k.c * cy * cy) -
          2.0 * s * (k.d * cx + k.e * cy) + k.f;
  return out;
}

}  // namespace

DesignSystem build_design(const PointSet& points) {
  require_points(points, 1);
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  DesignSystem ds;
  ds.phi.resize(n, 5);
  ds.rhs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = points.points[i].x(), y = points.points[i].y();
    ds.phi(i, 0) = x * x - y * y;
    ds.phi(i, 1) = 2.0 * x * y;
    ds.phi(i, 2) = 2.0 * x;
    ds.phi(i, 3) = 2.0 * y;
    ds.phi(i, 4) = 1.0;
    ds.rhs(i) = -y * y;
  }
  return ds;
}

ReducedParams solve_weighted(const DesignSystem& design, const Eigen::VectorXd& weights) {
  if (weights.size() != design.rows())
    throw std::invalid_argument("weight vector size mismatch");

  Eigen::Matrix<double, Eigen::Dynamic, 5> m = design.phi;
  Eigen::VectorXd r = design.rhs;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double w = weights(i);
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("invalid weight");
    const double sw = std::sqrt(w);
    m.row(i) *= sw;
    r(i) *= sw;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < kRankTol * sv(0))
    throw RankDeficient("weighted design matrix is numerically rank deficient");

  return ReducedParams::from_vec(svd.solve(r));
}

FitReport fit_als(const PointSet& points, const AlsOptions& options) {
  require_points(points, 5);

  ReducedParams p;
  if (!options.precondition) {
    p = solve_weighted(build_design(points), Eigen::VectorXd::Ones(points.size()));
  } else {
    Point2 centroid = Point2::Zero();
    for (const Point2& q : points.points) centroid += q;
    centroid /= static_cast<double>(points.size());
    double ssq = 0.0;
    for (const Point2& q : points.points) ssq += (q - centroid).squaredNorm();
    const double rms = std::sqrt(ssq / static_cast<double>(points.size()));
    const double s = rms > 0.0 ? std::sqrt(2.0) / rms : 1.0;

    PointSet shifted;
    shifted.points.reserve(points.size());
    for (const Point2& q : points.points) shifted.points.emplace_back(s * (q - centroid));

    const ReducedParams ps =
        solve_weighted(build_design(shifted), Eigen::VectorXd::Ones(shifted.size()));
    p = ReducedParams::from_conic(unshift_conic(ps.to_conic(), s, centroid.x(), centroid.y()));
  }

  FitReport report;
  report.params = p;
  report.residuals.reserve(points.size());
  for (const Point2& q : points.points) report.residuals.push_back(algebraic_residual(p, q));
  report.ellipse = conic_to_geometric(p.to_conic());
  report.iterations = 1;
  return report;
}

ReducedParams fit_exact_5(const PointSet& points) {
  if (points.size() != 5) throw std::invalid_argument("exactly 5 points required");
  require_points(points, 5);

  const DesignSystem ds = build_design(points);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ds.phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(4) < 1e-12 * sv(0))
    throw SingularSystem("5-point conic system is singular");
  return ReducedParams::from_vec(svd.solve(ds.rhs));
}

}  // namespace ellipsefit
