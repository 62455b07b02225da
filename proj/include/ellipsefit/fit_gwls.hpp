#pragma once

#include <optional>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

/// Squared gradient norm of the reduced conic at a point:
/// (dC/dx)^2 + (dC/dy)^2 with dC/dx = 2ax + 2by + 2d, dC/dy = -2ay + 2bx + 2e + 2y.
double gradient_sq(const ReducedParams& p, const Point2& point);

struct GwlsOptions {
  std::optional<ReducedParams> initial;  // defaults to the algebraic solution
  int max_iterations = 100;
  double tol = 1e-10;        // relative parameter change
  bool unit_weights = false; // single unweighted solve; reproduces fit_als exactly
};

/// Gradient-weighted least squares: fixed-point iteration that re-solves the
/// algebraic system with each residual normalized by its gradient magnitude.
/// On oscillation past the iteration budget the best iterate is returned with
/// converged = false. Throws RankDeficient, NotAnEllipse.
FitReport fit_gwls(const PointSet& points, const GwlsOptions& options = {});

}  // namespace ellipsefit
