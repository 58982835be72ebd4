#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "ncar/ar_model.hpp"
#include "ncar/error.hpp"
#include "ncar/estimation.hpp"
#include "ncar/harness.hpp"
#include "ncar/portmanteau.hpp"
#include "ncar/series_io.hpp"
#include "ncar/stable.hpp"

namespace ncar::cli {
namespace {

using nlohmann::json;

// Flag-level problems detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::optional<std::vector<double>> try_number_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    try {
      out.push_back(parse_double(part));
    } catch (const InvalidArgument&) {
      return std::nullopt;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::vector<double> number_list(const std::string& flag, const std::string& text) {
  auto values = try_number_list(text);
  if (!values) throw UsageError(flag + ": expected a comma-separated list of numbers, got '" + text + "'");
  return *values;
}

std::vector<std::size_t> lag_list(const std::string& text) {
  std::vector<std::size_t> lags;
  for (double v : number_list("--lags", text)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("--lags: every lag must be a positive integer");
    lags.push_back(static_cast<std::size_t>(v));
  }
  return lags;
}

json noise_json(const StableParams& p) {
  return json{{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"delta", p.delta}};
}

void echo(std::ostream& err, const json& config) { err << "config: " << config.dump() << '\n'; }

// --model accepts inline coefficients or the JSON report written by `fit`.
ArModel resolve_model(const std::string& spec) {
  if (auto inline_phi = try_number_list(spec)) return ArModel(*inline_phi);
  std::ifstream in(spec);
  if (!in) throw UsageError("--model: '" + spec + "' is neither a coefficient list nor a readable file");
  json report;
  try {
    report = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("--model: '" + spec + "' is not valid JSON: " + e.what());
  }
  if (!report.contains("phi_hat") || !report["phi_hat"].is_array()) {
    throw UsageError("--model: '" + spec + "' has no 'phi_hat' array");
  }
  return ArModel(report["phi_hat"].get<std::vector<double>>());
}

struct SimulateOptions {
  std::string phi;
  StableParams noise;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> burn;
  std::string out;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const ArModel model(number_list("--phi", o.phi));
  o.noise.validate();
  json config{{"command", "simulate"}, {"phi", model.coeffs()}, {"noise", noise_json(o.noise)},
              {"n", o.n},          {"seed", o.seed},         {"out", o.out}};
  config["burn"] = o.burn ? json(*o.burn) : json("auto");
  echo(err, config);
  const std::vector<double> path =
      o.burn ? simulate(model, o.noise, o.n, *o.burn, o.seed) : simulate(model, o.noise, o.n, o.seed);
  write_series_file(o.out, path);
  out << "wrote " << path.size() << " values to " << o.out << '\n';
  return kSuccess;
}

struct FitOptions {
  std::string in;
  std::size_t order = 0;
  FitConfig config = desk_fit_config();
  std::uint64_t seed = 1;
};

int cmd_fit(FitOptions o, std::ostream& out, std::ostream& err) {
  if (o.order == 0) throw UsageError("--order must be at least 1");
  o.config.validate();
  echo(err, json{{"command", "fit"},
                 {"in", o.in},
                 {"order", o.order},
                 {"starts", o.config.n_starts},
                 {"refine", o.config.n_refine},
                 {"tol", o.config.simplex_tol},
                 {"max_iter", o.config.max_iter},
                 {"workers", o.config.workers},
                 {"seed", o.seed}});
  const std::vector<double> series = read_series_file(o.in);
  const FitResult fit = fit_mle(series, o.order, o.config, o.seed);
  const json report{{"phi_hat", fit.model.coeffs()},
                    {"alpha", fit.noise.alpha},
                    {"beta", fit.noise.beta},
                    {"gamma", fit.noise.gamma},
                    {"delta", fit.noise.delta},
                    {"loglik", fit.loglik},
                    {"converged", fit.converged},
                    {"n_evaluations", fit.n_evaluations}};
  out << report.dump(2) << '\n';
  return kSuccess;
}

struct TestOptions {
  std::string in;
  std::string model;
  std::string lags = "5,10,15,20,25";
  std::string trim = "0.01,0.99";
  std::string format = "csv";
};

int cmd_test(const TestOptions& o, std::ostream& out, std::ostream& err) {
  const std::vector<std::size_t> lags = lag_list(o.lags);
  const std::vector<double> bounds = number_list("--trim", o.trim);
  if (bounds.size() != 2) throw UsageError("--trim expects two values: lower,upper");
  const TrimSpec trim{bounds[0], bounds[1]};
  try {
    trim.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("--trim: ") + e.what());
  }
  std::optional<ArModel> model;
  if (!o.model.empty()) model = resolve_model(o.model);
  json config{{"command", "test"},
              {"in", o.in},
              {"lags", lags},
              {"trim", {trim.lambda_lower, trim.lambda_upper}},
              {"format", o.format}};
  config["model"] = model ? json(model->coeffs()) : json("none (input holds residuals)");
  echo(err, config);

  std::vector<double> data = read_series_file(o.in);
  if (model) data = residuals(data, *model);
  const std::vector<BatteryRow> rows = run_battery(data, lags, trim);

  std::size_t failures = 0;
  if (o.format == "csv") {
    out << "statistic,m,value,p_value,distribution,error\n";
    for (const BatteryRow& row : rows) {
      out << to_string(row.name) << ',' << row.m << ',';
      if (row.report) {
        out << format_double(row.report->statistic) << ',' << format_double(row.report->p_value) << ','
            << row.report->distribution.describe() << ",\n";
      } else {
        ++failures;
        std::string msg = row.error;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        out << ",,,\"" << msg << "\"\n";
      }
    }
  } else {
    json arr = json::array();
    for (const BatteryRow& row : rows) {
      json j{{"statistic", to_string(row.name)}, {"m", row.m}};
      if (row.report) {
        j["value"] = row.report->statistic;
        j["p_value"] = row.report->p_value;
        j["distribution"] = row.report->distribution.describe();
      } else {
        ++failures;
        j["error"] = row.error;
      }
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
  }
  if (failures == rows.size()) {
    err << "error: every statistic failed; first failure: " << rows.front().error << '\n';
    return kNumericalFailure;
  }
  return kSuccess;
}

struct ExperimentOptions {
  std::string config;
  std::string out_dir;
  std::optional<std::size_t> workers;
  bool known = false;
};

int cmd_experiment(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
  std::ifstream in(o.config);
  if (!in) throw UsageError("--config: cannot open '" + o.config + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentSpec spec;
  try {
    spec = spec_from_json(buf.str());
  } catch (const InvalidArgument& e) {
    throw UsageError(o.config + ": " + e.what());
  }
  if (o.workers) {
    if (*o.workers == 0) throw UsageError("--workers must be at least 1");
    spec.workers = *o.workers;
  }
  json config = json::parse(spec_to_json(spec));
  config["command"] = "experiment";
  config["out_dir"] = o.out_dir;
  config["known_parameters"] = o.known;
  echo(err, config);

  const ExperimentResult result = o.known ? size_under_known_params(spec) : run_experiment(spec);
  std::filesystem::create_directories(o.out_dir);
  const auto dir = std::filesystem::path(o.out_dir);
  {
    std::ofstream csv(dir / "results.csv", std::ios::binary);
    csv << to_csv(result);
    if (!csv) throw InvalidArgument("failed writing " + (dir / "results.csv").string());
  }
  {
    std::ofstream js(dir / "results.json", std::ios::binary);
    js << to_json(result);
    if (!js) throw InvalidArgument("failed writing " + (dir / "results.json").string());
  }
  out << "wrote " << (dir / "results.csv").string() << " and " << (dir / "results.json").string() << " ("
      << result.cells.size() << " rows, " << result.excluded << " excluded replications"
      << (result.flagged ? ", FLAGGED" : "") << ")\n";
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Goodness-of-fit diagnostics for non-causal AR models with stable innovations", "ncar"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Simulate a stationary AR path with stable innovations");
  s->add_option("--phi", sim.phi, "AR coefficients, comma-separated")->required();
  s->add_option("--alpha", sim.noise.alpha, "Stable tail exponent")->required();
  s->add_option("--beta", sim.noise.beta, "Stable skewness")->capture_default_str();
  s->add_option("--gamma", sim.noise.gamma, "Stable scale")->capture_default_str();
  s->add_option("--delta", sim.noise.delta, "Stable location")->capture_default_str();
  s->add_option("--n", sim.n, "Number of observations after the p presample values")->required();
  s->add_option("--seed", sim.seed, "Random seed")->required();
  s->add_option("--burn", sim.burn, "Burn-in on each side (default: Laurent truncation)");
  s->add_option("--out", sim.out, "Output series file")->required();

  FitOptions fit;
  auto* f = app.add_subcommand("fit", "Maximum-likelihood fit of an AR(p) model with stable noise");
  f->add_option("--in", fit.in, "Series file")->required();
  f->add_option("--order", fit.order, "AR order p")->required();
  f->add_option("--starts", fit.config.n_starts, "Random starting points")->capture_default_str();
  f->add_option("--refine", fit.config.n_refine, "Starts polished by Nelder-Mead")->capture_default_str();
  f->add_option("--tol", fit.config.simplex_tol, "Simplex convergence tolerance")->capture_default_str();
  f->add_option("--max-iter", fit.config.max_iter, "Iteration cap per polish")->capture_default_str();
  f->add_option("--workers", fit.config.workers, "Threads")->capture_default_str();
  f->add_option("--seed", fit.seed, "Random seed")->capture_default_str();

  TestOptions test;
  auto* t = app.add_subcommand("test", "Portmanteau tests on residuals");
  t->add_option("--in", test.in, "Residual file, or series file when --model is given")->required();
  t->add_option("--model", test.model, "AR coefficients (comma-separated) or a fit report JSON");
  t->add_option("--lags", test.lags, "Lag budgets m, comma-separated")->capture_default_str();
  t->add_option("--trim", test.trim, "Trimming percentiles lower,upper")->capture_default_str();
  t->add_option("--format", test.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  ExperimentOptions exp;
  auto* e = app.add_subcommand("experiment", "Monte-Carlo size/power experiment");
  e->add_option("--config", exp.config, "Experiment spec (JSON)")->required();
  e->add_option("--out-dir", exp.out_dir, "Directory for results.csv and results.json")->required();
  e->add_option("--workers", exp.workers, "Replication threads (overrides the config)");
  e->add_flag("--known-params", exp.known, "Skip fitting; use the true model's residuals");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& pe) {
    err << "usage error: " << pe.what() << '\n';
    return kUsageError;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim, out, err);
    if (f->parsed()) return cmd_fit(fit, out, err);
    if (t->parsed()) return cmd_test(test, out, err);
    return cmd_experiment(exp, out, err);
  } catch (const UsageError& ue) {
    err << "usage error: " << ue.what() << '\n';
    return kUsageError;
  } catch (const InvalidArgument& ia) {
    err << "error: " << ia.what() << '\n';
    return kUsageError;
  } catch (const Error& ne) {
    err << "numerical failure: " << ne.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace ncar::cli
