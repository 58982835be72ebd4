#include "ncar/harness.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>

#include "ncar/error.hpp"
#include "ncar/rng.hpp"
#include "ncar/series_io.hpp"
#include "parallel.hpp"

namespace ncar {
namespace {

using nlohmann::json;

struct Replication {
  ReplicationOutcome outcome;
  std::vector<BatteryRow> rows;
};

Replication run_one(const ExperimentSpec& spec, std::size_t index, bool known) {
  Replication rep;
  const std::uint64_t child = derive_seed(spec.master_seed, index);
  rep.outcome.seed = child;
  try {
    const std::vector<double> path = simulate(spec.true_model, spec.noise, spec.n, derive_seed(child, 0));
    ArModel model = spec.true_model;
    if (known) {
      rep.outcome.converged = true;
    } else {
      FitConfig cfg = spec.fit_config;
      cfg.workers = 1;
      const FitResult fit = fit_mle(path, spec.fit_order, cfg, derive_seed(child, 1));
      rep.outcome.converged = fit.converged;
      if (!fit.converged) {
        rep.outcome.excluded = true;
        rep.outcome.error = "no polished simplex run converged";
        return rep;
      }
      model = fit.model;
    }
    const std::vector<double> resid = residuals(path, model);
    rep.rows = run_battery(resid, spec.lags, spec.trim);
  } catch (const Error& e) {
    rep.outcome.converged = false;
    rep.outcome.excluded = true;
    rep.outcome.error = e.what();
  }
  return rep;
}

ExperimentResult run(const ExperimentSpec& spec, bool known) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Replication> reps(spec.replications);
  detail::parallel_for(reps.size(), spec.workers,
                       [&](std::size_t r) { reps[r] = run_one(spec, r, known); });

  ExperimentResult out;
  out.spec = spec;
  out.known_parameters = known;
  for (std::size_t m : spec.lags) {
    for (Statistic s : kAllStatistics) out.cells.push_back(RejectionCell{s, m, 0, 0});
  }
  for (Replication& rep : reps) {
    if (rep.outcome.excluded) ++out.excluded;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const BatteryRow& row = rep.rows[i];
      if (!row.report) continue;
      RejectionCell& cell = out.cells[i];  // rows and cells share the lag-major order
      ++cell.replications;
      if (row.report->p_value < spec.level) ++cell.rejections;
    }
    out.outcomes.push_back(std::move(rep.outcome));
  }
  out.flagged = static_cast<double>(out.excluded) > kFailureFlagFraction * static_cast<double>(spec.replications);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

json noise_json(const StableParams& p) {
  return json{{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"delta", p.delta}};
}

json spec_json(const ExperimentSpec& spec) {
  const FitConfig& fc = spec.fit_config;
  const StartBox& b = fc.box;
  return json{
      {"true_model", spec.true_model.coeffs()},
      {"noise", noise_json(spec.noise)},
      {"n", spec.n},
      {"fit_order", spec.fit_order},
      {"lags", spec.lags},
      {"replications", spec.replications},
      {"level", spec.level},
      {"fit_config",
       {{"n_starts", fc.n_starts},
        {"n_refine", fc.n_refine},
        {"simplex_tol", fc.simplex_tol},
        {"max_iter", fc.max_iter},
        {"box",
         {{"root_modulus_min", b.root_modulus_min},
          {"root_modulus_max", b.root_modulus_max},
          {"excluded_lower", b.excluded_lower},
          {"excluded_upper", b.excluded_upper},
          {"alpha_min", b.alpha_min},
          {"alpha_max", b.alpha_max},
          {"beta_min", b.beta_min},
          {"beta_max", b.beta_max},
          {"log_gamma_halfwidth", b.log_gamma_halfwidth},
          {"delta_halfwidth", b.delta_halfwidth}}}}},
      {"master_seed", spec.master_seed},
      {"trim", {{"lambda_lower", spec.trim.lambda_lower}, {"lambda_upper", spec.trim.lambda_upper}}},
      {"workers", spec.workers},
  };
}

// Typed field access with the dotted key path in every error message.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidArgument(where() + "must be a JSON object");
  }

  [[nodiscard]] bool has(const char* key) const { return j_.contains(key); }

  [[nodiscard]] const json& get(const char* key) const {
    if (!j_.contains(key)) throw InvalidArgument("missing required field '" + full(key) + "'");
    return j_.at(key);
  }

  [[nodiscard]] double number(const char* key) const {
    const json& v = get(key);
    if (!v.is_number()) throw InvalidArgument("field '" + full(key) + "' must be a number");
    return v.get<double>();
  }

  [[nodiscard]] std::uint64_t count(const char* key) const {
    const json& v = get(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw InvalidArgument("field '" + full(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  void number(const char* key, double& out) const {
    if (has(key)) out = number(key);
  }
  void count(const char* key, std::size_t& out) const {
    if (has(key)) out = static_cast<std::size_t>(count(key));
  }

  [[nodiscard]] Reader child(const char* key) const { return Reader(get(key), full(key)); }
  [[nodiscard]] std::string full(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  [[nodiscard]] std::string where() const { return path_.empty() ? "config " : "field '" + path_ + "' "; }

  const json& j_;
  std::string path_;
};

std::vector<double> number_array(const Reader& r, const char* key) {
  const json& v = r.get(key);
  if (!v.is_array()) throw InvalidArgument("field '" + r.full(key) + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw InvalidArgument("field '" + r.full(key) + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

FitConfig desk_fit_config() {
  FitConfig cfg;
  cfg.n_starts = 200;
  cfg.n_refine = 4;
  return cfg;
}

void ExperimentSpec::validate() const {
  noise.validate();
  fit_config.validate();
  if (replications == 0) throw InvalidArgument("ExperimentSpec: replications must be at least 1");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("ExperimentSpec: level must lie in (0, 1)");
  if (lags.empty()) throw InvalidArgument("ExperimentSpec: lags must not be empty");
  for (std::size_t m : lags) {
    if (m == 0 || m >= n) throw InvalidArgument("ExperimentSpec: every lag must lie in [1, n)");
  }
  if (n < 2) throw InvalidArgument("ExperimentSpec: n must be at least 2");
  if (workers == 0) throw InvalidArgument("ExperimentSpec: workers must be at least 1");
  trim.validate();
  (void)find_roots(true_model);
}

const RejectionCell& ExperimentResult::cell(Statistic s, std::size_t m) const {
  for (const RejectionCell& c : cells) {
    if (c.statistic == s && c.m == m) return c;
  }
  throw InvalidArgument("ExperimentResult: no cell for " + std::string(to_string(s)) + " at m=" + std::to_string(m));
}

ExperimentResult run_experiment(const ExperimentSpec& spec) { return run(spec, false); }

ExperimentResult size_under_known_params(const ExperimentSpec& spec) { return run(spec, true); }

std::string to_csv(const ExperimentResult& result) {
  std::string out = "statistic,m,rejections,replications,fraction\n";
  for (const RejectionCell& c : result.cells) {
    out += to_string(c.statistic);
    out += ',' + std::to_string(c.m) + ',' + std::to_string(c.rejections) + ',' + std::to_string(c.replications) +
           ',' + format_double(c.fraction()) + '\n';
  }
  return out;
}

std::string to_json(const ExperimentResult& result) {
  json cells = json::array();
  for (const RejectionCell& c : result.cells) {
    cells.push_back({{"statistic", to_string(c.statistic)},
                     {"m", c.m},
                     {"rejections", c.rejections},
                     {"replications", c.replications},
                     {"fraction", c.fraction()}});
  }
  json reps = json::array();
  for (std::size_t r = 0; r < result.outcomes.size(); ++r) {
    const ReplicationOutcome& o = result.outcomes[r];
    json entry{{"index", r}, {"seed", o.seed}, {"converged", o.converged}, {"excluded", o.excluded}};
    if (!o.error.empty()) entry["error"] = o.error;
    reps.push_back(std::move(entry));
  }
  const json doc{
      {"spec", spec_json(result.spec)},
      {"known_parameters", result.known_parameters},
      {"rejections", std::move(cells)},
      {"replications", std::move(reps)},
      {"excluded", result.excluded},
      {"flagged", result.flagged},
      {"failed_fit_policy", "replications whose fit fails are excluded from every denominator; flagged above 20%"},
      {"master_seed", result.spec.master_seed},
      {"wall_seconds", result.wall_seconds},
  };
  return doc.dump(2) + "\n";
}

std::string spec_to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2) + "\n"; }

ExperimentSpec spec_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  const Reader root(doc, "");
  ExperimentSpec spec;
  spec.true_model = ArModel(number_array(root, "true_model"));

  const Reader noise = root.child("noise");
  spec.noise = StableParams{noise.number("alpha"), noise.number("beta"), noise.number("gamma"),
                            noise.number("delta")};
  spec.n = static_cast<std::size_t>(root.count("n"));
  spec.fit_order = static_cast<std::size_t>(root.count("fit_order"));
  if (root.has("lags")) {
    spec.lags.clear();
    const json& lags = root.get("lags");
    if (!lags.is_array()) throw InvalidArgument("field 'lags' must be an array of positive integers");
    for (const json& e : lags) {
      if (!e.is_number_integer() || e.get<std::int64_t>() < 1) {
        throw InvalidArgument("field 'lags' must be an array of positive integers");
      }
      spec.lags.push_back(e.get<std::size_t>());
    }
  }
  root.count("replications", spec.replications);
  root.number("level", spec.level);
  if (root.has("master_seed")) spec.master_seed = root.count("master_seed");
  root.count("workers", spec.workers);
  if (root.has("fit_config")) {
    const Reader fc = root.child("fit_config");
    fc.count("n_starts", spec.fit_config.n_starts);
    fc.count("n_refine", spec.fit_config.n_refine);
    fc.number("simplex_tol", spec.fit_config.simplex_tol);
    fc.count("max_iter", spec.fit_config.max_iter);
    if (fc.has("box")) {
      const Reader b = fc.child("box");
      StartBox& box = spec.fit_config.box;
      b.number("root_modulus_min", box.root_modulus_min);
      b.number("root_modulus_max", box.root_modulus_max);
      b.number("excluded_lower", box.excluded_lower);
      b.number("excluded_upper", box.excluded_upper);
      b.number("alpha_min", box.alpha_min);
      b.number("alpha_max", box.alpha_max);
      b.number("beta_min", box.beta_min);
      b.number("beta_max", box.beta_max);
      b.number("log_gamma_halfwidth", box.log_gamma_halfwidth);
      b.number("delta_halfwidth", box.delta_halfwidth);
    }
  }
  if (root.has("trim")) {
    const Reader t = root.child("trim");
    t.number("lambda_lower", spec.trim.lambda_lower);
    t.number("lambda_upper", spec.trim.lambda_upper);
  }
  if (spec.fit_order == 0) throw InvalidArgument("field 'fit_order' must be at least 1");
  spec.validate();
  return spec;
}

}  // namespace ncar
