#include "ellipsefit/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/fit_algebraic.hpp"
#include "ellipsefit/fit_orthogonal.hpp"
#include "ellipsefit/geometry.hpp"
#include "ellipsefit/rng.hpp"

namespace ellipsefit {

namespace {

double rho_cauchy(double u) { return 0.5 * std::log1p(u * u); }
double psi_cauchy(double u) { return u / (1.0 + u * u); }
double weight_cauchy(double u) { return 1.0 / (1.0 + u * u); }

double rho_quadratic(double u) { return 0.5 * u * u; }
double psi_quadratic(double u) { return u; }
double weight_quadratic(double) { return 1.0; }

/// Signed residuals of the reduced conic; the orthogonal kind carries the sign
/// of the algebraic value (negative inside the ellipse).
std::vector<double> residuals_of(const ReducedParams& p, const PointSet& points,
                                 ResidualKind kind) {
  std::vector<double> r;
  r.reserve(points.size());
  if (kind == ResidualKind::Algebraic) {
    for (const Point2& q : points.points) r.push_back(algebraic_residual(p, q));
  } else {
    const GeometricEllipse e = conic_to_geometric(p.to_conic());
    for (const Point2& q : points.points) {
      const double sign = algebraic_residual(p, q) < 0.0 ? -1.0 : 1.0;
      r.push_back(sign * project_orthogonal(e, q).distance.norm());
    }
  }
  return r;
}

double scale_floor(const std::vector<double>& residuals) {
  double max_abs = 0.0;
  for (double d : residuals) max_abs = std::max(max_abs, std::abs(d));
  return 1e-14 * (1.0 + max_abs) + std::numeric_limits<double>::min();
}

}  // namespace

double cauchy_weight(double d, double c) {
  const double u = d / c;
  return 1.0 / (1.0 + u * u);
}

RhoFunction cauchy_rho() { return {"cauchy", rho_cauchy, psi_cauchy, weight_cauchy, 2.3849}; }

RhoFunction quadratic_rho() {
  return {"quadratic", rho_quadratic, psi_quadratic, weight_quadratic, 1.0};
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty range");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  if (values.size() % 2 != 0) return values[mid];
  const double upper = values[mid];
  std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
  return 0.5 * (values[mid - 1] + upper);
}

double robust_sigma_mad(std::vector<double> values) {
  const double med = median(values);
  for (double& v : values) v = std::abs(v - med);
  return median(std::move(values)) / 0.6745;
}

FitReport fit_mest(const PointSet& points, const MestOptions& options) {
  if (points.size() < 5) throw std::invalid_argument("need at least 5 points");
  const DesignSystem ds = build_design(points);
  const Eigen::Index n = ds.rows();

  ReducedParams p = solve_weighted(ds, Eigen::VectorXd::Ones(n));

  ReducedParams best = p;
  double best_objective = std::numeric_limits<double>::infinity();
  bool converged = false;
  int it = 0;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);

  while (it < options.max_iterations) {
    const std::vector<double> d = residuals_of(p, points, options.residual_kind);
    double c = options.scale ? *options.scale
                             : options.rho.tuning * robust_sigma_mad(d);
    c = std::max(c, scale_floor(d));

    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = d[static_cast<std::size_t>(i)] / c;
      w(i) = options.rho.weight(u);
      objective += options.rho.rho(u) * c * c;
    }
    if (objective < best_objective) {
      best_objective = objective;
      best = p;
    }

    const ReducedParams next = solve_weighted(ds, w);
    ++it;
    const double change = (next.vec() - p.vec()).norm();
    p = next;
    if (change < options.tol * (1.0 + p.vec().norm())) {
      converged = true;
      break;
    }
  }

  FitReport report;
  report.params = converged ? p : best;
  report.converged = converged;
  report.iterations = it;

  const std::vector<double> d = residuals_of(report.params, points, options.residual_kind);
  double c = options.scale ? *options.scale : options.rho.tuning * robust_sigma_mad(d);
  c = std::max(c, scale_floor(d));
  report.residuals = d;
  report.weights.reserve(points.size());
  for (double v : d) report.weights.push_back(options.rho.weight(v / c));

  report.ellipse = conic_to_geometric(report.params.to_conic());
  return report;
}

LmedsReport fit_lmeds(const PointSet& points, const LmedsOptions& options) {
  const int n = static_cast<int>(points.size());
  if (n < 5) throw std::invalid_argument("need at least 5 points");
  if (options.subsets < 1) throw std::invalid_argument("need at least one subset");

  LmedsReport out;
  out.trials.reserve(static_cast<std::size_t>(options.subsets));

  std::vector<int> pool(static_cast<std::size_t>(n));
  int best = -1;
  double best_median = std::numeric_limits<double>::infinity();

  for (int t = 0; t < options.subsets; ++t) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(t)));

    // Partial Fisher-Yates draw of 5 distinct indices.
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    SubsetTrial trial;
    trial.median_sq = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 5; ++k) {
      const int j = rng.uniform_int(k, n - 1);
      std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
      trial.indices[static_cast<std::size_t>(k)] = pool[static_cast<std::size_t>(k)];
    }

    PointSet subset;
    subset.points.reserve(5);
    for (int idx : trial.indices) subset.points.push_back(points.points[static_cast<std::size_t>(idx)]);

    try {
      const ReducedParams p = fit_exact_5(subset);
      if (!p.to_conic().is_ellipse()) throw NotAnEllipse("subset conic is not an ellipse");

      std::vector<double> r = residuals_of(p, points, options.residual_kind);
      for (double& v : r) v *= v;
      trial.params = p;
      trial.median_sq = median(std::move(r));
      trial.valid = true;
    } catch (const FitError&) {
      ++out.failed_subsets;
    }

    if (trial.valid && trial.median_sq < best_median) {
      best_median = trial.median_sq;
      best = t;
    }
    out.trials.push_back(trial);
  }

  if (best < 0) throw NoValidSubset("all subset fits failed");

  const SubsetTrial& winner = out.trials[static_cast<std::size_t>(best)];
  out.fit.params = *winner.params;
  out.fit.ellipse = conic_to_geometric(out.fit.params.to_conic());
  out.fit.iterations = options.subsets;
  out.fit.residuals = residuals_of(out.fit.params, points, options.residual_kind);
  out.robust_sigma = 1.4826 * (1.0 + 5.0 / (n - 5.0)) * std::sqrt(winner.median_sq);

  if (options.polish && out.robust_sigma > 0.0) {
    PointSet inliers;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (std::abs(out.fit.residuals[i]) <= options.inlier_factor * out.robust_sigma)
        inliers.points.push_back(points.points[i]);
    if (inliers.size() >= 5) {
      try {
        const FitReport polished = fit_ols(inliers, out.fit.ellipse);
        out.fit.ellipse = polished.ellipse;
        out.fit.params = polished.params;
        out.fit.residuals = residuals_of(out.fit.params, points, options.residual_kind);
        out.fit.iterations += polished.iterations;
        out.polished = true;
      } catch (const FitError&) {
        // Keep the subset estimate; it is a complete answer on its own.
      }
    }
  }
  return out;
}

}  // namespace ellipsefit
