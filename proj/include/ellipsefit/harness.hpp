#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

inline constexpr std::uint64_t kDefaultSeed = 12345;

enum class OutlierModel { Offset, UniformBox };

struct OutlierSpec {
  int count = 0;
  OutlierModel model = OutlierModel::Offset;
  double magnitude = 1.0;  // scales the displacement / scatter box
};

/// Synthetic-scenario parameters: arc range, per-coordinate noise variance,
/// outlier injection and the master seed.
struct ScenarioConfig {
  GeometricEllipse ellipse{0.0, 0.0, 24.0, 12.0, 0.0};
  int n = 100;
  double t_min = std::numbers::pi / 2.0;
  double t_max = 3.0 * std::numbers::pi / 2.0;
  double noise_sigma2 = 0.25;
  OutlierSpec outlier;
  std::uint64_t seed = kDefaultSeed;
};

/// Equally spaced parameter values, Gaussian noise on both coordinates, then
/// outlier replacement; labels record which points were replaced. Fully
/// determined by the seed.
PointSet generate(const ScenarioConfig& config);

enum class Method { Als, Ols, Gwls, Mest, Lmeds };

const char* method_name(Method m);
std::vector<Method> parse_methods(const std::string& selector);  // "als,ols" or "all"

/// Runs one fitter with its default pipeline (the orthogonal fit starts from
/// the algebraic solution).
FitReport run_method(Method m, const PointSet& points);

/// Per-parameter errors between canonicalized ellipses; the angle error uses
/// the half-turn symmetry, so axis-swapped representations compare equal.
struct ParamError {
  double da = 0, db = 0, dcenter = 0, dalpha = 0;
  double norm() const;
};

ParamError parameter_error(const GeometricEllipse& estimate, const GeometricEllipse& truth);

struct ComparisonRow {
  std::string method;
  std::optional<GeometricEllipse> estimate;
  std::optional<ParamError> errors;
  int iterations = 0;
  double ms = 0.0;
  std::string failure;  // non-empty when the fitter raised an error
};

struct ComparisonTable {
  std::optional<GeometricEllipse> truth;
  std::vector<ComparisonRow> rows;  // ground truth row first when truth is given
};

/// Fitter failures become row-level entries, never exceptions.
ComparisonTable compare(const PointSet& points, const std::vector<Method>& methods,
                        const std::optional<GeometricEllipse>& truth);

std::string format_table_text(const ComparisonTable& table);
/// Columns: method,a,b,xc,yc,alpha,err_a,err_b,err_center,err_alpha,iterations,ms.
/// Error columns are blank without ground truth. The ms column can be dropped
/// for byte-stable output.
std::string format_table_csv(const ComparisonTable& table, bool include_ms = true);

struct MethodStats {
  int trials = 0;    // successful trials entering the statistics
  int failures = 0;
  double mean_da = 0, std_da = 0;
  double mean_db = 0, std_db = 0;
  double mean_dcenter = 0, std_dcenter = 0;
  double mean_dalpha = 0, std_dalpha = 0;
  double mean_norm = 0, std_norm = 0;
  double mean_est_a = 0;  // mean estimated semi-major axis, for bias checks
};

struct MonteCarloSummary {
  std::vector<Method> methods;
  std::vector<MethodStats> stats;  // parallel to methods
  int trials = 0;
};

/// Independent trials with per-trial derived seeds; identical results for any
/// thread count.
MonteCarloSummary monte_carlo(const ScenarioConfig& config, const std::vector<Method>& methods,
                              int trials, unsigned threads = 1);

std::string format_summary_text(const MonteCarloSummary& summary);
std::string format_summary_csv(const MonteCarloSummary& summary);

}  // namespace ellipsefit
