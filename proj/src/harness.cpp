#include "ellipsefit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/fit_algebraic.hpp"
#include "ellipsefit/fit_gwls.hpp"
#include "ellipsefit/fit_orthogonal.hpp"
#include "ellipsefit/geometry.hpp"
#include "ellipsefit/rng.hpp"
#include "ellipsefit/robust.hpp"
#include "format.hpp"

namespace ellipsefit {

namespace {

void validate(const ScenarioConfig& config) {
  if (config.n < 5) throw std::invalid_argument("scenario needs n >= 5");
  if (!(config.noise_sigma2 >= 0.0)) throw std::invalid_argument("negative noise variance");
  if (!(config.t_min < config.t_max)) throw std::invalid_argument("empty parameter interval");
  if (config.outlier.count < 0 || config.outlier.count > config.n)
    throw std::invalid_argument("outlier count out of range");
  if (!(config.outlier.magnitude > 0.0)) throw std::invalid_argument("outlier magnitude <= 0");
  if (!(config.ellipse.a > 0.0) || !(config.ellipse.b > 0.0))
    throw std::invalid_argument("scenario ellipse has non-positive axes");
}

/// Outward unit normal of the ellipse at parameter t, world frame.
Point2 outward_normal(const GeometricEllipse& e, double t) {
  const Point2 canonical(e.b * std::cos(t), e.a * std::sin(t));
  const RotationFrame frame = RotationFrame::of(e);
  return (frame.rotation.transpose() * canonical).normalized();
}

}  // namespace

PointSet generate(const ScenarioConfig& config) {
  validate(config);
  Rng rng(config.seed);

  std::vector<double> ts(static_cast<std::size_t>(config.n));
  const double span = config.t_max - config.t_min;
  for (int i = 0; i < config.n; ++i)
    ts[static_cast<std::size_t>(i)] =
        config.t_min + span * static_cast<double>(i) / static_cast<double>(config.n - 1);

  PointSet out = sample_parametric(config.ellipse, ts);
  const std::vector<Point2> clean = out.points;

  const double sigma = std::sqrt(config.noise_sigma2);
  for (Point2& p : out.points) {
    p.x() += rng.gaussian(sigma);
    p.y() += rng.gaussian(sigma);
  }

  out.labels.assign(out.points.size(), 0);
  if (config.outlier.count > 0) {
    std::vector<int> pool(static_cast<std::size_t>(config.n));
    for (int i = 0; i < config.n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int k = 0; k < config.outlier.count; ++k) {
      const int j = rng.uniform_int(k, config.n - 1);
      std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> chosen(pool.begin(), pool.begin() + config.outlier.count);
    std::sort(chosen.begin(), chosen.end());

    Point2 lo = clean.front(), hi = clean.front();
    for (const Point2& p : clean) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Point2 box_center = 0.5 * (lo + hi);
    const Point2 half = 0.5 * (hi - lo);

    for (int idx : chosen) {
      const std::size_t i = static_cast<std::size_t>(idx);
      if (config.outlier.model == OutlierModel::Offset) {
        const double dist = rng.uniform(5.0, 15.0) * config.outlier.magnitude;
        out.points[i] += dist * outward_normal(config.ellipse, ts[i]);
      } else {
        out.points[i] = box_center + config.outlier.magnitude *
                                         Point2(rng.uniform(-1.0, 1.0) * half.x(),
                                                rng.uniform(-1.0, 1.0) * half.y());
      }
      out.labels[i] = 1;
    }
  }
  return out;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Als: return "als";
    case Method::Ols: return "ols";
    case Method::Gwls: return "gwls";
    case Method::Mest: return "mest";
    case Method::Lmeds: return "lmeds";
  }
  return "?";
}

std::vector<Method> parse_methods(const std::string& selector) {
  std::vector<Method> out;
  std::stringstream ss(selector);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    if (token == "all") {
      return {Method::Als, Method::Ols, Method::Gwls, Method::Mest, Method::Lmeds};
    } else if (token == "als") {
      out.push_back(Method::Als);
    } else if (token == "ols") {
      out.push_back(Method::Ols);
    } else if (token == "gwls") {
      out.push_back(Method::Gwls);
    } else if (token == "mest") {
      out.push_back(Method::Mest);
    } else if (token == "lmeds") {
      out.push_back(Method::Lmeds);
    } else {
      throw std::invalid_argument("unknown method: " + token);
    }
  }
  if (out.empty()) throw std::invalid_argument("no methods selected");
  return out;
}

FitReport run_method(Method m, const PointSet& points) {
  switch (m) {
    case Method::Als:
      return fit_als(points);
    case Method::Ols: {
      const FitReport init = fit_als(points);
      return fit_ols(points, init.ellipse);
    }
    case Method::Gwls:
      return fit_gwls(points);
    case Method::Mest:
      return fit_mest(points);
    case Method::Lmeds:
      return fit_lmeds(points).fit;
  }
  throw std::logic_error("unreachable");
}

double ParamError::norm() const {
  return std::sqrt(da * da + db * db + dcenter * dcenter + dalpha * dalpha);
}

ParamError parameter_error(const GeometricEllipse& estimate, const GeometricEllipse& truth) {
  const GeometricEllipse e = canonicalize_geometric(estimate);
  const GeometricEllipse t = canonicalize_geometric(truth);
  ParamError err;
  err.da = std::abs(e.a - t.a);
  err.db = std::abs(e.b - t.b);
  err.dcenter = std::hypot(e.xc - t.xc, e.yc - t.yc);
  err.dalpha = angle_distance(e.alpha, t.alpha);
  return err;
}

ComparisonTable compare(const PointSet& points, const std::vector<Method>& methods,
                        const std::optional<GeometricEllipse>& truth) {
  if (methods.empty()) throw std::invalid_argument("no methods requested");

  ComparisonTable table;
  table.truth = truth;
  if (truth) {
    ComparisonRow row;
    row.method = "truth";
    row.estimate = canonicalize_geometric(*truth);
    row.errors = ParamError{};
    table.rows.push_back(row);
  }

  for (Method m : methods) {
    ComparisonRow row;
    row.method = method_name(m);
    const auto start = std::chrono::steady_clock::now();
    try {
      const FitReport report = run_method(m, points);
      row.estimate = report.ellipse;
      row.iterations = report.iterations;
      if (truth) row.errors = parameter_error(report.ellipse, *truth);
    } catch (const FitError& err) {
      row.failure = err.what();
    }
    row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                 .count();
    table.rows.push_back(row);
  }
  return table;
}

std::string format_table_text(const ComparisonTable& table) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"method", "a", "b", "xc", "yc", "alpha", "err_a", "err_b", "err_center",
                   "err_alpha", "iters", "ms"});
  for (const ComparisonRow& row : table.rows) {
    std::vector<std::string> line;
    line.push_back(row.method);
    if (!row.failure.empty()) {
      line.push_back("error: " + row.failure);
      cells.push_back(line);
      continue;
    }
    const GeometricEllipse& e = *row.estimate;
    for (double v : {e.a, e.b, e.xc, e.yc, e.alpha}) line.push_back(format_fixed(v, 4));
    if (row.errors) {
      const ParamError& pe = *row.errors;
      for (double v : {pe.da, pe.db, pe.dcenter, pe.dalpha}) line.push_back(format_fixed(v, 4));
    } else {
      line.insert(line.end(), 4, "-");
    }
    if (row.method == "truth") {
      line.push_back("-");
      line.push_back("-");
    } else {
      line.push_back(std::to_string(row.iterations));
      line.push_back(format_fixed(row.ms, 2));
    }
    cells.push_back(line);
  }

  std::vector<std::size_t> widths(cells[0].size(), 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size() && c < widths.size(); ++c)
      widths[c] = std::max(widths[c], line[c].size());

  std::string out;
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) out += "  ";
      out += line[c];
      if (c + 1 < line.size() && line[c].size() < widths[c])
        out.append(widths[c] - line[c].size(), ' ');
    }
    out += '\n';
  }
  return out;
}

std::string format_table_csv(const ComparisonTable& table, bool include_ms) {
  std::string out = "method,a,b,xc,yc,alpha,err_a,err_b,err_center,err_alpha,iterations";
  if (include_ms) out += ",ms";
  out += '\n';
  for (const ComparisonRow& row : table.rows) {
    out += row.method;
    if (!row.failure.empty()) {
      out += ",,,,,,,,,,";
      if (include_ms) out += ',';
      out += '\n';
      continue;
    }
    const GeometricEllipse& e = *row.estimate;
    for (double v : {e.a, e.b, e.xc, e.yc, e.alpha}) out += ',' + format_double(v);
    if (row.errors) {
      const ParamError& pe = *row.errors;
      for (double v : {pe.da, pe.db, pe.dcenter, pe.dalpha}) out += ',' + format_double(v);
    } else {
      out += ",,,,";
    }
    out += ',' + (row.method == "truth" ? std::string() : std::to_string(row.iterations));
    if (include_ms)
      out += ',' + (row.method == "truth" ? std::string() : format_fixed(row.ms, 3));
    out += '\n';
  }
  return out;
}

namespace {

struct TrialOutcome {
  bool ok = false;
  ParamError error;
  double est_a = 0.0;
};

void accumulate(MethodStats& stats, const std::vector<TrialOutcome>& outcomes,
                auto metric, double& mean, double& stddev) {
  double sum = 0.0;
  int count = 0;
  for (const TrialOutcome& o : outcomes)
    if (o.ok) {
      sum += metric(o);
      ++count;
    }
  if (count == 0) {
    mean = stddev = 0.0;
    return;
  }
  mean = sum / count;
  double ssq = 0.0;
  for (const TrialOutcome& o : outcomes)
    if (o.ok) {
      const double dev = metric(o) - mean;
      ssq += dev * dev;
    }
  stddev = count > 1 ? std::sqrt(ssq / (count - 1)) : 0.0;
  stats.trials = count;
}

}  // namespace

MonteCarloSummary monte_carlo(const ScenarioConfig& config, const std::vector<Method>& methods,
                              int trials, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (methods.empty()) throw std::invalid_argument("no methods requested");
  validate(config);

  // outcomes[t][m]; filled independently per trial, aggregated in trial order.
  std::vector<std::vector<TrialOutcome>> outcomes(
      static_cast<std::size_t>(trials), std::vector<TrialOutcome>(methods.size()));

  auto run_trial = [&](int t) {
    ScenarioConfig trial_config = config;
    trial_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
    const PointSet points = generate(trial_config);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      TrialOutcome& outcome = outcomes[static_cast<std::size_t>(t)][m];
      try {
        const FitReport report = run_method(methods[m], points);
        outcome.ok = true;
        outcome.error = parameter_error(report.ellipse, config.ellipse);
        outcome.est_a = canonicalize_geometric(report.ellipse).a;
      } catch (const FitError&) {
        outcome.ok = false;
      }
    }
  };

  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      futures.push_back(std::async(std::launch::async, [&, w] {
        for (int t = static_cast<int>(w); t < trials; t += static_cast<int>(threads))
          run_trial(t);
      }));
    }
    for (auto& f : futures) f.get();
  }

  MonteCarloSummary summary;
  summary.methods = methods;
  summary.trials = trials;
  summary.stats.resize(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<TrialOutcome> per_method;
    per_method.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) per_method.push_back(outcomes[static_cast<std::size_t>(t)][m]);

    MethodStats& st = summary.stats[m];
    st.failures = static_cast<int>(
        std::count_if(per_method.begin(), per_method.end(), [](const TrialOutcome& o) {
          return !o.ok;
        }));
    accumulate(st, per_method, [](const TrialOutcome& o) { return o.error.da; }, st.mean_da,
               st.std_da);
    accumulate(st, per_method, [](const TrialOutcome& o) { return o.error.db; }, st.mean_db,
               st.std_db);
    accumulate(st, per_method, [](const TrialOutcome& o) { return o.error.dcenter; },
               st.mean_dcenter, st.std_dcenter);
    accumulate(st, per_method, [](const TrialOutcome& o) { return o.error.dalpha; },
               st.mean_dalpha, st.std_dalpha);
    accumulate(st, per_method, [](const TrialOutcome& o) { return o.error.norm(); }, st.mean_norm,
               st.std_norm);
    double dummy = 0.0;
    accumulate(st, per_method, [](const TrialOutcome& o) { return o.est_a; }, st.mean_est_a,
               dummy);
  }
  return summary;
}

std::string format_summary_text(const MonteCarloSummary& summary) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"method", "ok", "fail", "mean|da|", "std", "mean|db|", "std", "mean|dc|",
                   "std", "mean|dalpha|", "std", "mean_norm", "mean_a"});
  for (std::size_t m = 0; m < summary.methods.size(); ++m) {
    const MethodStats& st = summary.stats[m];
    cells.push_back({method_name(summary.methods[m]), std::to_string(st.trials),
                     std::to_string(st.failures), format_fixed(st.mean_da, 4),
                     format_fixed(st.std_da, 4), format_fixed(st.mean_db, 4),
                     format_fixed(st.std_db, 4), format_fixed(st.mean_dcenter, 4),
                     format_fixed(st.std_dcenter, 4), format_fixed(st.mean_dalpha, 4),
                     format_fixed(st.std_dalpha, 4), format_fixed(st.mean_norm, 4),
                     format_fixed(st.mean_est_a, 4)});
  }
  std::vector<std::size_t> widths(cells[0].size(), 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) out += "  ";
      out += line[c];
      if (c + 1 < line.size()) out.append(widths[c] - line[c].size(), ' ');
    }
    out += '\n';
  }
  return out;
}

std::string format_summary_csv(const MonteCarloSummary& summary) {
  std::string out =
      "method,trials,failures,mean_da,std_da,mean_db,std_db,mean_dcenter,std_dcenter,"
      "mean_dalpha,std_dalpha,mean_norm,std_norm,mean_est_a\n";
  for (std::size_t m = 0; m < summary.methods.size(); ++m) {
    const MethodStats& st = summary.stats[m];
    out += method_name(summary.methods[m]);
    out += ',' + std::to_string(st.trials) + ',' + std::to_string(st.failures);
    for (double v : {st.mean_da, st.std_da, st.mean_db, st.std_db, st.mean_dcenter,
                     st.std_dcenter, st.mean_dalpha, st.std_dalpha, st.mean_norm, st.std_norm,
                     st.mean_est_a})
      out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace ellipsefit
