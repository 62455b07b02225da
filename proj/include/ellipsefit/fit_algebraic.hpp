#pragma once

#include "ellipsefit/types.hpp"

namespace ellipsefit {

/// Linear system of the a+c=1 reduced conic: rows phi_i = [x^2-y^2, 2xy, 2x, 2y, 1]
/// against targets z_i = -y^2, so that C(x_i, y_i) = phi_i p - z_i.
struct DesignSystem {
  Eigen::Matrix<double, Eigen::Dynamic, 5> phi;
  Eigen::VectorXd rhs;

  Eigen::Index rows() const { return phi.rows(); }
};

DesignSystem build_design(const PointSet& points);

/// Minimizer of sum_i w_i (phi_i p - z_i)^2 via orthogonal factorization.
/// Throws RankDeficient when the weighted design numerically loses column rank
/// (smallest singular value below 1e-10 of the largest).
ReducedParams solve_weighted(const DesignSystem& design, const Eigen::VectorXd& weights);

struct AlsOptions {
  /// Shift data to its centroid and rescale to RMS radius sqrt(2) before
  /// fitting, then map the parameters back. Helps large-offset coordinates.
  bool precondition = false;
};

/// Least-squares fit minimizing the algebraic distance. The report carries the
/// per-point algebraic residuals and the geometric conversion of the minimizer.
/// Throws RankDeficient and NotAnEllipse.
FitReport fit_als(const PointSet& points, const AlsOptions& options = {});

/// Exact conic through five points. Throws SingularSystem when the 5x5 system
/// is singular within 1e-12.
ReducedParams fit_exact_5(const PointSet& points);

}  // namespace ellipsefit
