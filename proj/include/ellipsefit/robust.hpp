#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

/// w(d, c) = 1 / (1 + (d/c)^2)
double cauchy_weight(double d, double c);

/// Robust loss in unit-scale form u = d / c: symmetric, zero at zero,
/// non-decreasing in |u|, with finite weight(0) = psi(0)/0 limit.
struct RhoFunction {
  const char* name;
  double (*rho)(double u);
  double (*psi)(double u);     // d rho / d u
  double (*weight)(double u);  // psi(u) / u

  /// c = tuning * robust sigma of the current residuals.
  double tuning = 1.0;
};

RhoFunction cauchy_rho();     // tuning 2.3849 (95% Gaussian efficiency)
RhoFunction quadratic_rho();  // unit weights; degenerates to the algebraic fit

/// MAD-based scale: median absolute deviation about the median, over 0.6745.
double robust_sigma_mad(std::vector<double> values);

/// Median; averages the two middle elements for even counts.
double median(std::vector<double> values);

enum class ResidualKind { Algebraic, Orthogonal };

struct MestOptions {
  RhoFunction rho = cauchy_rho();
  ResidualKind residual_kind = ResidualKind::Algebraic;
  std::optional<double> scale;  // fixed c; defaults to tuning * MAD sigma per iteration
  int max_iterations = 100;
  double tol = 1e-10;
};

/// M-estimator by iterated reweighted least squares on the algebraic system,
/// initialized from the algebraic fit. Final weights are usable as soft inlier
/// flags. On oscillation the best iterate is returned with converged = false.
/// Throws RankDeficient.
FitReport fit_mest(const PointSet& points, const MestOptions& options = {});

/// One minimal-subset trial: the 5 indices drawn, the interpolating conic when
/// the fit succeeded, and the median of squared residuals over all points.
struct SubsetTrial {
  std::array<int, 5> indices{};
  std::optional<ReducedParams> params;
  double median_sq = 0.0;
  bool valid = false;
};

struct LmedsOptions {
  int subsets = 106;
  ResidualKind residual_kind = ResidualKind::Algebraic;
  std::uint64_t seed = 0x5eedULL;
  /// Refit orthogonally on the inlier set of the winning subset. Raw
  /// minimal-subset estimates carry large extrapolation variance on partial
  /// arcs; the polish removes it while keeping the subset-based selection.
  bool polish = true;
  double inlier_factor = 2.5;  // residual cutoff in robust sigmas for the polish
};

struct LmedsReport {
  FitReport fit;
  std::vector<SubsetTrial> trials;
  int failed_subsets = 0;
  double robust_sigma = 0.0;
  bool polished = false;  // polish requested, applicable and successful
};

/// Least median of squares over seeded random 5-point subsets; deterministic
/// for fixed (points, subsets, seed). Failed subsets (singular or non-ellipse)
/// are skipped and counted. Throws NoValidSubset when every trial fails.
LmedsReport fit_lmeds(const PointSet& points, const LmedsOptions& options = {});

}  // namespace ellipsefit
