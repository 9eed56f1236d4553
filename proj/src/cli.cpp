#include "lfsurv/cli.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfsurv/dataset.hpp"
#include "lfsurv/distribution.hpp"
#include "lfsurv/errors.hpp"
#include "lfsurv/inference.hpp"
#include "lfsurv/model_eval.hpp"
#include "lfsurv/montecarlo.hpp"

namespace lfsurv::cli {

namespace {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

Cell opt_cell(const std::optional<Vec3>& v, int i) {
  if (!v) return std::monostate{};
  return (*v)[i];
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "NA";
        else if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else return v;
      },
      c);
}

nlohmann::json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
        else return v;
      },
      c);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct OutputOptions {
  std::string format = "csv";
  std::string path;
  bool no_timestamp = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output,-o", path, "Write the report to this file instead of stdout");
    cmd->add_flag("--no-timestamp", no_timestamp, "Omit the generation timestamp");
  }
};

void render(const Table& table, const OutputOptions& opts, std::ostream& os) {
  if (opts.format == "json") {
    nlohmann::json doc;
    if (!opts.no_timestamp) doc["generated"] = utc_timestamp();
    doc["columns"] = table.columns;
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
      doc["rows"].push_back(obj);
    }
    os << doc.dump(2) << '\n';
    return;
  }
  if (!opts.no_timestamp) os << "# generated " << utc_timestamp() << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

void emit(const Table& table, const OutputOptions& opts, std::ostream& out) {
  if (opts.path.empty()) {
    render(table, opts, out);
    return;
  }
  std::ofstream file(opts.path);
  if (!file) throw ParseError(0, "cannot open output file '" + opts.path + "'");
  render(table, opts, file);
}

struct OptimizerOptions {
  OptimizerConfig config;
  std::uint64_t seed = 20170101;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for optimizer restarts and simulation");
    cmd->add_option("--max-iter", config.max_iterations, "Nelder-Mead iterations per run")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", config.simplex_tolerance, "Relative simplex function-value spread")->check(CLI::PositiveNumber);
    cmd->add_option("--restarts", config.restarts, "Additional perturbed starts")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--anneal", config.annealing_enabled, "Run a simulated-annealing prelude");
    cmd->add_option("--anneal-steps", config.annealing_steps, "Annealing steps")->check(CLI::PositiveNumber);
    cmd->add_option("--anneal-temp", config.annealing_initial_temp, "Initial annealing temperature")
        ->check(CLI::PositiveNumber);
  }

  OptimizerConfig resolved() const {
    OptimizerConfig c = config;
    c.seed = seed;
    return c;
  }
};

enum class Model { lf, lt_weibull };

const std::map<std::string, Model> kModelNames{{"lf", Model::lf}, {"lt-weibull", Model::lt_weibull}};

FitResult fit_named(Model model, const CensoredSample& data, const OptimizerConfig& cfg, double level) {
  return model == Model::lf ? fit(data, cfg, level) : fit_lt_weibull(data, cfg, level);
}

// --- fit ---------------------------------------------------------------------

struct FitOptions {
  std::string data;
  std::string model = "lf";
  double level = 0.95;
  OptimizerOptions optimizer;
  OutputOptions output;
};

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
  const CensoredSample data = load_dataset(o.data);
  const Model model = kModelNames.at(o.model);
  const FitResult r = fit_named(model, data, o.optimizer.resolved(), o.level);
  const ModelScore score = information_criteria(r.loglik, 3, static_cast<int>(data.size()));

  Table t{{"parameter", "estimate", "se", "ci_lower", "ci_upper"}, {}};
  // (scale, shape, p) internally; reported shape first
  const std::array<std::string, 3> names =
      model == Model::lf ? std::array<std::string, 3>{"lambda", "alpha", "p"}
                         : std::array<std::string, 3>{"scale", "shape", "p"};
  for (int i : {1, 0, 2})
    t.rows.push_back({names[i], r.estimates[i], opt_cell(r.std_errors, i), opt_cell(r.ci_lower, i),
                      opt_cell(r.ci_upper, i)});
  t.rows.push_back({std::string("neg_loglik"), score.neg_loglik, std::monostate{}, std::monostate{}, std::monostate{}});
  t.rows.push_back({std::string("aic"), score.aic, std::monostate{}, std::monostate{}, std::monostate{}});
  t.rows.push_back({std::string("aicc"), score.aicc, std::monostate{}, std::monostate{}, std::monostate{}});
  emit(t, o.output, out);

  if (!r.has_intervals()) err << "warning: observed information is not positive definite; SEs unavailable\n";
  if (!r.converged) {
    err << "error: optimizer did not converge\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// --- simulate ----------------------------------------------------------------

struct SimulateOptions {
  double alpha = 0.0;
  double lambda = 0.0;
  double p = 0.0;
  double censoring = 0.0;
  std::vector<std::size_t> sizes{25, 50, 100, 200, 300};
  std::size_t reps = 2000;
  double level = 0.95;
  unsigned threads = 0;
  OptimizerOptions optimizer;
  OutputOptions output;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  Scenario s;
  s.truth = LfParams(o.lambda, o.alpha, o.p);
  s.sample_sizes = o.sizes;
  s.replications = o.reps;
  s.target_censoring = o.censoring;
  s.ci_level = o.level;
  s.base_seed = o.optimizer.seed;
  s.optimizer = o.optimizer.resolved();
  s.threads = o.threads;
  const auto reports = run_scenario(s);

  Table t{{"n", "parameter", "mre", "mse", "coverage", "m_p", "replications_used"}, {}};
  for (const auto& r : reports) {
    const std::pair<const char*, const ParamStats*> params[] = {{"alpha", &r.alpha}, {"lambda", &r.lambda}, {"p", &r.p}};
    for (const auto& [name, st] : params)
      t.rows.push_back({static_cast<std::int64_t>(r.n), std::string(name), st->mre, st->mse, st->coverage,
                        r.realized_censoring, static_cast<std::int64_t>(r.replications_used)});
  }
  emit(t, o.output, out);
  return kExitOk;
}

// --- curves ------------------------------------------------------------------

struct CurvesOptions {
  double lambda = 0.0;
  double alpha = 0.0;
  double p = 0.0;
  double from = 0.01;
  double to = 10.0;
  std::size_t points = 200;
  std::string grid = "log";
  std::string data;
  OutputOptions output;
};

int cmd_curves(const CurvesOptions& o, std::ostream& out) {
  const LfParams params(o.lambda, o.alpha, o.p);
  if (o.points < 2) throw DomainError("grid needs at least 2 points");
  if (!(o.from > 0.0 && o.to > o.from)) throw DomainError("grid requires 0 < from < to");

  std::optional<KmCurve> km;
  if (!o.data.empty()) km = kaplan_meier(load_dataset(o.data));

  Table t{{"t", "pdf", "cdf", "survival", "hazard"}, {}};
  if (km) t.columns.push_back("km");
  const bool log_grid = o.grid == "log";
  for (std::size_t i = 0; i < o.points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(o.points - 1);
    double x = log_grid ? std::exp(std::log(o.from) + frac * (std::log(o.to) - std::log(o.from)))
                        : o.from + frac * (o.to - o.from);
    if (i == o.points - 1) x = o.to;
    std::vector<Cell> row{x, pdf(params, x), cdf(params, x), survival(params, x), hazard(params, x)};
    if (km) row.emplace_back(km->at(x));
    t.rows.push_back(std::move(row));
  }
  emit(t, o.output, out);
  return kExitOk;
}

// --- compare -----------------------------------------------------------------

struct CompareOptions {
  std::string data;
  std::vector<std::string> models{"lf", "lt-weibull"};
  std::vector<std::string> external;  // name=neg_loglik:k
  double level = 0.95;
  OptimizerOptions optimizer;
  OutputOptions output;
};

std::pair<std::string, ModelScore> parse_external(const std::string& spec, int n) {
  const auto eq = spec.find('=');
  const auto colon = spec.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos || eq == 0)
    throw ParseError(0, "external score must look like name=neg_loglik:k, got '" + spec + "'");
  try {
    const double nll = std::stod(spec.substr(eq + 1, colon - eq - 1));
    const int k = std::stoi(spec.substr(colon + 1));
    return {spec.substr(0, eq), information_criteria(-nll, k, n)};
  } catch (const std::logic_error&) {
    throw ParseError(0, "external score must look like name=neg_loglik:k, got '" + spec + "'");
  }
}

int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err) {
  const CensoredSample data = load_dataset(o.data);
  const int n = static_cast<int>(data.size());
  std::vector<std::pair<std::string, ModelScore>> scored;
  std::vector<std::pair<std::string, std::string>> failed;
  int code = kExitOk;
  for (const auto& name : o.models) {
    try {
      const FitResult r = fit_named(kModelNames.at(name), data, o.optimizer.resolved(), o.level);
      scored.emplace_back(name, information_criteria(r.loglik, 3, n));
      if (!r.converged) {
        err << "warning: " << name << ": optimizer did not converge\n";
        code = std::max(code, kExitNumerical);
      }
    } catch (const NoEvents& e) {
      err << "error: " << name << ": " << e.what() << '\n';
      failed.emplace_back(name, "NoEvents");
      code = std::max(code, kExitUsage);
    } catch (const NonFiniteObjective& e) {
      err << "error: " << name << ": " << e.what() << '\n';
      failed.emplace_back(name, "NonFiniteObjective");
      code = std::max(code, kExitNumerical);
    }
  }
  for (const auto& spec : o.external) scored.push_back(parse_external(spec, n));

  Table t{{"model", "neg_loglik", "aic", "aicc", "rank"}, {}};
  for (const auto& m : compare(scored))
    t.rows.push_back({m.name, m.score.neg_loglik, m.score.aic, m.score.aicc, static_cast<std::int64_t>(m.rank)});
  for (const auto& [name, reason] : failed)
    t.rows.push_back({name, std::monostate{}, std::monostate{}, std::monostate{}, reason});
  emit(t, o.output, out);
  return code;
}

// --- export ------------------------------------------------------------------

int cmd_export(const std::string& source, const std::string& path, std::ostream& out) {
  const CensoredSample data = load_dataset(source);
  if (path.empty()) {
    write_dataset(out, data);
    return kExitOk;
  }
  std::ofstream file(path);
  if (!file) throw ParseError(0, "cannot open output file '" + path + "'");
  write_dataset(file, data);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-term Frechet cure-fraction survival analysis", "lfsurv"};
  app.require_subcommand(1);
  const auto models = CLI::IsMember({"lf", "lt-weibull"});

  FitOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a cure model by maximum likelihood");
  fit_cmd->add_option("--data", fit_opts.data, "CSV file (time,status) or 'kersey1987'")->required();
  fit_cmd->add_option("--model", fit_opts.model, "lf or lt-weibull")->check(models);
  fit_cmd->add_option("--level", fit_opts.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  fit_opts.optimizer.attach(fit_cmd);
  fit_opts.output.attach(fit_cmd);

  SimulateOptions sim_opts;
  sim_opts.optimizer.seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study of the LF maximum-likelihood estimators");
  sim_cmd->add_option("--alpha", sim_opts.alpha, "True shape")->required();
  sim_cmd->add_option("--lambda", sim_opts.lambda, "True scale")->required();
  sim_cmd->add_option("--p", sim_opts.p, "True cure fraction")->required();
  sim_cmd->add_option("--censoring", sim_opts.censoring, "Target censored proportion")->required();
  sim_cmd->add_option("--n", sim_opts.sizes, "Sample sizes, comma separated")->delimiter(',');
  sim_cmd->add_option("--reps", sim_opts.reps, "Replications per sample size")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--level", sim_opts.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--threads", sim_opts.threads, "Worker threads (0 = all cores)");
  sim_opts.optimizer.attach(sim_cmd);
  sim_opts.output.attach(sim_cmd);

  CurvesOptions curve_opts;
  auto* curves_cmd = app.add_subcommand("curves", "Tabulate pdf, cdf, survival and hazard");
  curves_cmd->add_option("--lambda", curve_opts.lambda, "Scale")->required();
  curves_cmd->add_option("--alpha", curve_opts.alpha, "Shape")->required();
  curves_cmd->add_option("--p", curve_opts.p, "Cure fraction")->required();
  curves_cmd->add_option("--from", curve_opts.from, "First grid point");
  curves_cmd->add_option("--to", curve_opts.to, "Last grid point");
  curves_cmd->add_option("--points", curve_opts.points, "Number of grid points");
  curves_cmd->add_option("--grid", curve_opts.grid, "log or linear spacing")->check(CLI::IsMember({"log", "linear"}));
  curves_cmd->add_option("--data", curve_opts.data, "Add the Kaplan-Meier curve of this dataset");
  curve_opts.output.attach(curves_cmd);

  CompareOptions cmp_opts;
  auto* cmp_cmd = app.add_subcommand("compare", "Rank cure models by AICc");
  cmp_cmd->add_option("--data", cmp_opts.data, "CSV file (time,status) or 'kersey1987'")->required();
  cmp_cmd->add_option("--models", cmp_opts.models, "Models to fit, comma separated")->delimiter(',')->check(models);
  cmp_cmd->add_option("--external", cmp_opts.external, "Externally fitted model as name=neg_loglik:k");
  cmp_cmd->add_option("--level", cmp_opts.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  cmp_opts.optimizer.attach(cmp_cmd);
  cmp_opts.output.attach(cmp_cmd);

  std::string export_data, export_path;
  auto* export_cmd = app.add_subcommand("export", "Write a dataset as time,status CSV");
  export_cmd->add_option("--data", export_data, "CSV file or 'kersey1987'")->required();
  export_cmd->add_option("--output,-o", export_path, "Destination file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_opts, out, err);
    if (*sim_cmd) return cmd_simulate(sim_opts, out);
    if (*curves_cmd) return cmd_curves(curve_opts, out);
    if (*cmp_cmd) return cmd_compare(cmp_opts, out, err);
    if (*export_cmd) return cmd_export(export_data, export_path, out);
  } catch (const CalibrationInfeasible& e) {
    err << "error: calibration infeasible: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NoEvents& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NonFiniteObjective& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace lfsurv::cli
