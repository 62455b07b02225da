#include "ellipsefit/fit_gwls.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/fit_algebraic.hpp"
#include "ellipsefit/geometry.hpp"

namespace ellipsefit {

namespace {

constexpr double kWeightFloor = 1e-12;  // relative to the largest gradient

/// Row weights 1 / ||grad C_i||^2, floored to keep near-center points finite.
Eigen::VectorXd gradient_row_weights(const ReducedParams& p, const PointSet& points) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = gradient_sq(p, points.points[i]);
  const double floor = kWeightFloor * g.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) g(i) = 1.0 / std::max(g(i), floor);
  return g;
}

double weighted_objective(const DesignSystem& ds, const Eigen::VectorXd& row_weights,
                          const ReducedParams& p) {
  const Eigen::VectorXd r = ds.phi * p.vec() - ds.rhs;
  return r.cwiseAbs2().dot(row_weights);
}

}  // namespace

double gradient_sq(const ReducedParams& p, const Point2& point) {
  const double x = point.x(), y = point.y();
  const double gx = 2.0 * (p.a * x + p.b * y + p.d);
  const double gy = 2.0 * (-p.a * y + p.b * x + p.e + y);
  return gx * gx + gy * gy;
}

FitReport fit_gwls(const PointSet& points, const GwlsOptions& options) {
  if (points.size() < 5) throw std::invalid_argument("need at least 5 points");
  const DesignSystem ds = build_design(points);
  const Eigen::Index n = ds.rows();

  FitReport report;

  if (options.unit_weights) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    report.params = solve_weighted(ds, ones);
    report.weights.assign(static_cast<std::size_t>(n), 1.0);
    report.iterations = 1;
  } else {
    ReducedParams p =
        options.initial ? *options.initial : solve_weighted(ds, Eigen::VectorXd::Ones(n));

    Eigen::VectorXd w;
    ReducedParams best = p;
    double best_objective = std::numeric_limits<double>::infinity();
    bool converged = false;

    int it = 0;
    while (it < options.max_iterations) {
      w = gradient_row_weights(p, points);
      const ReducedParams next = solve_weighted(ds, w);
      ++it;

      const double objective = weighted_objective(ds, w, next);
      if (objective < best_objective) {
        best_objective = objective;
        best = next;
      }
      const double change = (next.vec() - p.vec()).norm();
      p = next;
      if (change < options.tol * (1.0 + p.vec().norm())) {
        converged = true;
        break;
      }
    }

    report.params = converged ? p : best;
    report.converged = converged;
    report.iterations = it;
    w = gradient_row_weights(report.params, points);
    report.weights.assign(w.data(), w.data() + w.size());
  }

  report.residuals.reserve(points.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = algebraic_residual(report.params, points.points[static_cast<std::size_t>(i)]);
    report.residuals.push_back(c * std::sqrt(report.weights[static_cast<std::size_t>(i)]));
  }
  report.ellipse = conic_to_geometric(report.params.to_conic());
  return report;
}

}  // namespace ellipsefit
