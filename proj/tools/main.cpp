// Command-line front end: synthetic data generation, fitting, method
// comparison, Monte Carlo summaries and SVG plots.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/fit_algebraic.hpp"
#include "ellipsefit/fit_gwls.hpp"
#include "ellipsefit/fit_orthogonal.hpp"
#include "ellipsefit/geometry.hpp"
#include "ellipsefit/harness.hpp"
#include "ellipsefit/io.hpp"
#include "ellipsefit/robust.hpp"

namespace {

using namespace ellipsefit;

GeometricEllipse parse_ellipse(const std::string& text) {
  GeometricEllipse e;
  double* fields[5] = {&e.xc, &e.yc, &e.a, &e.b, &e.alpha};
  std::stringstream ss(text);
  std::string token;
  int i = 0;
  while (std::getline(ss, token, ',')) {
    if (i >= 5) throw CLI::ValidationError("--ellipse expects xc,yc,a,b,alpha");
    try {
      *fields[i++] = std::stod(token);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--ellipse expects numeric xc,yc,a,b,alpha");
    }
  }
  if (i != 5) throw CLI::ValidationError("--ellipse expects xc,yc,a,b,alpha");
  return e;
}

struct ScenarioFlags {
  std::string ellipse = "0,0,24,12,0";
  std::string outlier_model = "offset";
  ScenarioConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--ellipse", ellipse, "Ground truth as xc,yc,a,b,alpha")
        ->capture_default_str();
    cmd->add_option("--n", config.n, "Number of points")->capture_default_str();
    cmd->add_option("--tmin", config.t_min, "Arc start (radians)")->capture_default_str();
    cmd->add_option("--tmax", config.t_max, "Arc end (radians)")->capture_default_str();
    cmd->add_option("--sigma2", config.noise_sigma2, "Noise variance per coordinate")
        ->capture_default_str();
    cmd->add_option("--outliers", config.outlier.count, "Number of points replaced by outliers")
        ->capture_default_str();
    cmd->add_option("--outlier-model", outlier_model, "offset | box")->capture_default_str();
    cmd->add_option("--outlier-magnitude", config.outlier.magnitude,
                    "Scale factor of the outlier displacement")
        ->capture_default_str();
    cmd->add_option("--seed", config.seed, "Master seed")->capture_default_str();
  }

  ScenarioConfig resolve() {
    config.ellipse = parse_ellipse(ellipse);
    if (outlier_model == "offset")
      config.outlier.model = OutlierModel::Offset;
    else if (outlier_model == "box")
      config.outlier.model = OutlierModel::UniformBox;
    else
      throw CLI::ValidationError("--outlier-model must be offset or box");
    return config;
  }
};

ResidualKind parse_residual(const std::string& text) {
  if (text == "algebraic") return ResidualKind::Algebraic;
  if (text == "orthogonal") return ResidualKind::Orthogonal;
  throw CLI::ValidationError("--residual must be algebraic or orthogonal");
}

void print_report(const std::string& method, const FitReport& report) {
  const GeometricEllipse& e = report.ellipse;
  std::printf("%s: xc=%.6f yc=%.6f a=%.6f b=%.6f alpha=%.6f\n", method.c_str(), e.xc, e.yc,
              e.a, e.b, e.alpha);
  double ssq = 0.0;
  for (double r : report.residuals) ssq += r * r;
  const double rms =
      report.residuals.empty() ? 0.0 : std::sqrt(ssq / static_cast<double>(report.residuals.size()));
  std::printf("  iterations=%d converged=%s residual_rms=%.6g\n", report.iterations,
              report.converged ? "yes" : "no", rms);
}

std::vector<std::pair<std::string, GeometricEllipse>> fit_overlays(
    const PointSet& points, const std::vector<Method>& methods,
    const std::optional<GeometricEllipse>& truth) {
  std::vector<std::pair<std::string, GeometricEllipse>> out;
  if (truth) out.emplace_back("truth", *truth);
  for (Method m : methods) {
    try {
      out.emplace_back(method_name(m), run_method(m, points).ellipse);
    } catch (const FitError& err) {
      std::fprintf(stderr, "warning: %s failed: %s\n", method_name(m), err.what());
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ellipse fitting estimators and simulation harness"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic scenario to CSV");
  ScenarioFlags gen_flags;
  gen_flags.attach(gen);
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output CSV path")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "Fit one method to a CSV point set");
  std::string fit_in, fit_method = "als", fit_residual = "algebraic", fit_svg;
  int fit_subsets = 106;
  bool fit_polish = LmedsOptions{}.polish;
  fit->add_option("--in", fit_in, "Input CSV path")->required();
  fit->add_option("--method", fit_method, "als | ols | gwls | mest | lmeds")
      ->capture_default_str();
  fit->add_option("--residual", fit_residual, "Residual kind for robust methods")
      ->capture_default_str();
  fit->add_option("--subsets", fit_subsets, "Subset count for lmeds")->capture_default_str();
  fit->add_flag("--polish,!--no-polish", fit_polish, "Orthogonal refit on the lmeds inlier set")
      ->capture_default_str();
  fit->add_option("--svg", fit_svg, "Optional SVG plot path");

  // compare
  auto* cmp = app.add_subcommand("compare", "Run several methods and tabulate");
  std::string cmp_in, cmp_methods = "all", cmp_truth, cmp_csv, cmp_svg;
  cmp->add_option("--in", cmp_in, "Input CSV path")->required();
  cmp->add_option("--methods", cmp_methods, "Comma-separated selector or 'all'")
      ->capture_default_str();
  cmp->add_option("--truth", cmp_truth, "Ground truth as xc,yc,a,b,alpha");
  cmp->add_option("--csv", cmp_csv, "Write the table as CSV");
  cmp->add_option("--svg", cmp_svg, "Write an overlay plot");

  // montecarlo
  auto* mc = app.add_subcommand("montecarlo", "Aggregate errors over seeded trials");
  ScenarioFlags mc_flags;
  mc_flags.attach(mc);
  std::string mc_methods = "all", mc_csv;
  int mc_trials = 200;
  unsigned mc_threads = 1;
  mc->add_option("--trials", mc_trials, "Trial count")->capture_default_str();
  mc->add_option("--methods", mc_methods, "Comma-separated selector or 'all'")
      ->capture_default_str();
  mc->add_option("--threads", mc_threads, "Worker threads")->capture_default_str();
  mc->add_option("--csv", mc_csv, "Write the summary as CSV");

  // plot
  auto* plot = app.add_subcommand("plot", "Render points (and optional fits) to SVG");
  std::string plot_in, plot_out, plot_methods, plot_truth;
  plot->add_option("--in", plot_in, "Input CSV path")->required();
  plot->add_option("--out", plot_out, "Output SVG path")->required();
  plot->add_option("--methods", plot_methods, "Fits to overlay (selector or 'all')");
  plot->add_option("--truth", plot_truth, "Ground truth as xc,yc,a,b,alpha");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const PointSet points = generate(gen_flags.resolve());
      write_csv(points, gen_out);
      std::printf("wrote %zu points to %s\n", points.size(), gen_out.c_str());
    } else if (fit->parsed()) {
      const PointSet points = read_csv(fit_in);
      FitReport report;
      if (fit_method == "als") {
        report = fit_als(points);
      } else if (fit_method == "ols") {
        report = fit_ols(points, fit_als(points).ellipse);
      } else if (fit_method == "gwls") {
        report = fit_gwls(points);
      } else if (fit_method == "mest") {
        MestOptions opt;
        opt.residual_kind = parse_residual(fit_residual);
        report = fit_mest(points, opt);
      } else if (fit_method == "lmeds") {
        LmedsOptions opt;
        opt.residual_kind = parse_residual(fit_residual);
        opt.subsets = fit_subsets;
        opt.polish = fit_polish;
        report = fit_lmeds(points, opt).fit;
      } else {
        throw CLI::ValidationError("--method must be als, ols, gwls, mest or lmeds");
      }
      print_report(fit_method, report);
      if (!fit_svg.empty()) render_svg(points, {{fit_method, report.ellipse}}, fit_svg);
    } else if (cmp->parsed()) {
      const PointSet points = read_csv(cmp_in);
      const std::vector<Method> methods = parse_methods(cmp_methods);
      std::optional<GeometricEllipse> truth;
      if (!cmp_truth.empty()) truth = parse_ellipse(cmp_truth);
      const ComparisonTable table = compare(points, methods, truth);
      std::fputs(format_table_text(table).c_str(), stdout);
      if (!cmp_csv.empty()) {
        std::ofstream file(cmp_csv, std::ios::binary);
        if (!file) throw IoError("cannot open for writing: " + cmp_csv);
        file << format_table_csv(table);
      }
      if (!cmp_svg.empty()) render_svg(points, fit_overlays(points, methods, truth), cmp_svg);
    } else if (mc->parsed()) {
      const ScenarioConfig config = mc_flags.resolve();
      const std::vector<Method> methods = parse_methods(mc_methods);
      const MonteCarloSummary summary = monte_carlo(config, methods, mc_trials, mc_threads);
      std::fputs(format_summary_text(summary).c_str(), stdout);
      if (!mc_csv.empty()) {
        std::ofstream file(mc_csv, std::ios::binary);
        if (!file) throw IoError("cannot open for writing: " + mc_csv);
        file << format_summary_csv(summary);
      }
    } else if (plot->parsed()) {
      const PointSet points = read_csv(plot_in);
      std::optional<GeometricEllipse> truth;
      if (!plot_truth.empty()) truth = parse_ellipse(plot_truth);
      std::vector<Method> methods;
      if (!plot_methods.empty()) methods = parse_methods(plot_methods);
      render_svg(points, fit_overlays(points, methods, truth), plot_out);
      std::printf("wrote %s\n", plot_out.c_str());
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
