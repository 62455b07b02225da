#include "ellipsefit/fit_orthogonal.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/geometry.hpp"

namespace ellipsefit {

namespace {

double sign_bias(double v) { return v >= 0.0 ? 1.0 : -1.0; }

Point2 transposed(const Point2& p) { return {p.y(), p.x()}; }

struct FootSystem {
  double f1, f2;
  Eigen::Matrix2d q;
};

/// f1 is the (scaled) on-curve condition, f2 demands that the connection to the
/// query point is normal to the curve; q is the Jacobian of (f1, f2) in the foot.
FootSystem foot_system(double a2, double b2, const Point2& foot, const Point2& query) {
  const double x = foot.x(), y = foot.y();
  const double xi = query.x(), yi = query.y();
  FootSystem s;
  s.f1 = 0.5 * (a2 * y * y + b2 * x * x - a2 * b2);
  s.f2 = b2 * x * (yi - y) - a2 * y * (xi - x);
  s.q << b2 * x, a2 * y,
      (a2 - b2) * y + b2 * yi, (a2 - b2) * x - a2 * xi;
  return s;
}

bool valid_axes(const GeometricEllipse& e) {
  return std::isfinite(e.xc) && std::isfinite(e.yc) && std::isfinite(e.alpha) &&
         std::isfinite(e.a) && std::isfinite(e.b) && e.a > 0.0 && e.b > 0.0;
}

struct OlsState {
  double ssq = 0.0;
  Eigen::VectorXd d;                            // stacked distance vectors, 2n
  Eigen::Matrix<double, Eigen::Dynamic, 5> j;   // stacked Jacobians, 2n x 5
  std::vector<double> norms;                    // per-point ||d_i||
};

OlsState evaluate_state(const PointSet& points, const GeometricEllipse& q,
                        const FootOptions& foot, bool with_jacobian) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  OlsState st;
  st.d.resize(2 * n);
  if (with_jacobian) st.j.resize(2 * n, 5);
  st.norms.resize(points.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const OrthogonalProjection pr = project_orthogonal(q, points.points[i], foot);
    st.d.segment<2>(2 * i) = pr.distance;
    if (with_jacobian) st.j.block<2, 5>(2 * i, 0) = pr.jacobian;
    const double nd = pr.distance.norm();
    st.norms[i] = nd;
    st.ssq += nd * nd;
  }
  return st;
}

}  // namespace

std::pair<Point2, Point2> foot_initial_candidates(double a, double b, const Point2& point) {
  const double xi = point.x(), yi = point.y();
  const double r = std::sqrt(b * b * xi * xi + a * a * yi * yi);
  const Point2 k1 = point * (a * b / r);
  Point2 k2;
  if (std::abs(xi) < a)
    k2 = {xi, sign_bias(yi) * (b / a) * std::sqrt(a * a - xi * xi)};
  else
    k2 = {sign_bias(xi) * a, 0.0};
  return {k1, k2};
}

FootPoint foot_point(double a, double b, const Point2& point, const FootOptions& options) {
  if (!(a > 0.0) || !(b > 0.0) || !point.allFinite())
    throw std::invalid_argument("foot_point: invalid ellipse or point");
  if (a < b) {
    // The iteration is symmetric in the axes; solve in the transposed frame.
    FootPoint fp = foot_point(b, a, transposed(point), options);
    return {transposed(fp.foot), transposed(fp.distance), fp.iterations};
  }
  if (point.x() == 0.0 && point.y() == 0.0) {
    // Exact center: every vertex is stationary; pick the +X major vertex.
    return {Point2(a, 0.0), Point2(-a, 0.0), 0};
  }

  const double a2 = a * a, b2 = b * b;
  const auto [k1, k2] = foot_initial_candidates(a, b, point);
  Point2 foot = 0.5 * (k1 + k2);

  const double tol = options.step_tol * (1.0 + a);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const FootSystem s = foot_system(a2, b2, foot, point);
    const double det = s.q(0, 0) * s.q(1, 1) - s.q(0, 1) * s.q(1, 0);
    const double scale = s.q.row(0).norm() * s.q.row(1).norm();
    if (std::abs(det) < 1e-14 * scale)
      throw SingularJacobian("foot-point Jacobian is singular");
    const Point2 step((s.q(1, 1) * s.f1 - s.q(0, 1) * s.f2) / det,
                      (s.q(0, 0) * s.f2 - s.q(1, 0) * s.f1) / det);
    foot -= step;
    if (step.norm() < tol) return {foot, point - foot, it};
  }
  throw NoConvergence("foot-point iteration exceeded its budget");
}

OrthogonalProjection project_orthogonal(const GeometricEllipse& e, const Point2& measurement,
                                        const FootOptions& options) {
  const RotationFrame frame = RotationFrame::of(e);
  const Point2 query = to_canonical(frame, measurement);
  const FootPoint fp = foot_point(e.a, e.b, query, options);

  const double a2 = e.a * e.a, b2 = e.b * e.b;
  const double x = fp.foot.x(), y = fp.foot.y();
  const double xi = query.x(), yi = query.y();
  const double c = std::cos(e.alpha), s = std::sin(e.alpha);

  // Columns are the parameter derivatives of (f1, f2) moved to the right-hand
  // side, including the dependence of the canonical query on the frame.
  Eigen::Matrix<double, 2, 5> bmat;
  bmat.col(0) << b2 * x * c - a2 * y * s,
      b2 * (yi - y) * c + a2 * (xi - x) * s;
  bmat.col(1) << b2 * x * s + a2 * y * c,
      b2 * (yi - y) * s - a2 * (xi - x) * c;
  bmat.col(2) << e.a * (b2 - y * y),
      2.0 * e.a * y * (xi - x);
  bmat.col(3) << e.b * (a2 - x * x),
      -2.0 * e.b * x * (yi - y);
  bmat.col(4) << (a2 - b2) * x * y,
      (a2 - b2) * (x * (x - xi) - y * (y - yi));

  const FootSystem sys = foot_system(a2, b2, fp.foot, query);
  const double det = sys.q(0, 0) * sys.q(1, 1) - sys.q(0, 1) * sys.q(1, 0);
  const double scale = sys.q.row(0).norm() * sys.q.row(1).norm();
  if (std::abs(det) < 1e-14 * scale)
    throw SingularJacobian("foot-point Jacobian is singular");
  Eigen::Matrix2d qinv;
  qinv << sys.q(1, 1), -sys.q(0, 1), -sys.q(1, 0), sys.q(0, 0);
  qinv /= det;

  OrthogonalProjection out;
  out.jacobian = frame.rotation.transpose() * (qinv * bmat);
  out.foot = from_canonical(frame, fp.foot);
  out.distance = measurement - out.foot;
  out.foot_iterations = fp.iterations;
  return out;
}

FitReport fit_ols(const PointSet& points, const GeometricEllipse& initial,
                  const OlsOptions& options) {
  if (points.size() < 5) throw std::invalid_argument("need at least 5 points");
  if (!valid_axes(initial)) throw BadInitial("initial parameters are not a valid ellipse");

  GeometricEllipse q = initial;
  OlsState st = evaluate_state(points, q, options.foot, true);

  FitReport report;
  report.objective_trace.push_back(st.ssq);
  report.converged = false;

  for (int outer = 0; outer < options.max_outer; ++outer) {
    const Vector5 gradient = st.j.transpose() * st.d;
    if (gradient.norm() < options.stationarity_tol * (1.0 + st.d.norm())) {
      report.converged = true;
      break;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(st.j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(4) < 1e-10 * sv(0))
      throw DegenerateStep("stacked Jacobian is rank deficient");
    const Vector5 dq = svd.solve(st.d);

    // Near the minimum the objective decrease falls below double rounding
    // before the gradient test can trigger; a negligible full step means the
    // parameters cannot move any further.
    const double qnorm = std::sqrt(q.xc * q.xc + q.yc * q.yc + q.a * q.a + q.b * q.b +
                                   q.alpha * q.alpha);
    if (dq.norm() < options.min_step * (1.0 + qnorm)) {
      report.converged = true;
      break;
    }

    auto apply_step = [&](double lambda) {
      GeometricEllipse trial = q;
      trial.xc += lambda * dq(0);
      trial.yc += lambda * dq(1);
      trial.a += lambda * dq(2);
      trial.b += lambda * dq(3);
      trial.alpha += lambda * dq(4);
      return trial;
    };

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, lambda *= 0.5) {
      const GeometricEllipse trial = apply_step(lambda);
      if (!valid_axes(trial)) continue;
      OlsState trial_state;
      try {
        trial_state = evaluate_state(points, trial, options.foot, true);
      } catch (const FitError&) {
        continue;  // foot points failed at this trial; shorten the step
      }
      if (trial_state.ssq < st.ssq) {
        q = trial;
        st = std::move(trial_state);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Decreases below the rounding noise of the objective are invisible to
      // the backtracking test, yet the fixed-point step keeps contracting
      // toward stationarity. Accept a full step inside the noise band.
      const GeometricEllipse trial = apply_step(1.0);
      if (valid_axes(trial)) {
        try {
          OlsState trial_state = evaluate_state(points, trial, options.foot, true);
          if (trial_state.ssq <= st.ssq * (1.0 + 1e-12)) {
            q = trial;
            st = std::move(trial_state);
            accepted = true;
          }
        } catch (const FitError&) {
        }
      }
    }
    if (!accepted) throw NoConvergence("no acceptable damped step");

    ++report.iterations;
    report.objective_trace.push_back(st.ssq);
  }
  if (!report.converged) throw NoConvergence("outer iteration exceeded its budget");

  report.ellipse = canonicalize_geometric(q);
  report.params = ReducedParams::from_conic(geometric_to_conic(report.ellipse));
  report.residuals = std::move(st.norms);
  return report;
}

}  // namespace ellipsefit
