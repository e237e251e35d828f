#include "stochcal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "stochcal/diagnostics.hpp"
#include "stochcal/errors.hpp"
#include "stochcal/evt.hpp"
#include "stochcal/garch.hpp"
#include "stochcal/gbm.hpp"
#include "stochcal/io.hpp"
#include "stochcal/jumps.hpp"
#include "stochcal/meanrev.hpp"
#include "stochcal/meanrev_jumps.hpp"
#include "stochcal/model_select.hpp"
#include "stochcal/rng.hpp"
#include "stochcal/subordinated.hpp"

namespace stochcal::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kModule = "cli";
constexpr int kSchemaVersion = 1;
constexpr double kFanLevels[] = {0.05, 0.25, 0.5, 0.75, 0.95};

struct NamedModel {
  Model model;
  std::string_view name;
};

constexpr NamedModel kModels[] = {
    {Model::Gbm, "gbm"},
    {Model::Ngarch, "ngarch"},
    {Model::Jumps, "jumps"},
    {Model::Vg, "vg"},
    {Model::Nig, "nig"},
    {Model::Vasicek, "vasicek"},
    {Model::ExpVasicek, "exp-vasicek"},
    {Model::Cir, "cir"},
    {Model::JumpVasicek, "jump-vasicek"},
    {Model::JumpVasicek2, "jump-vasicek2"},
};

bool is_rate_model(Model m) {
  return m == Model::Vasicek || m == Model::ExpVasicek || m == Model::Cir ||
         m == Model::JumpVasicek || m == Model::JumpVasicek2;
}

// ---- parameter (de)serialization ------------------------------------------

double field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    fail(ErrorCode::InvalidParam, kModule, std::string("params file lacks numeric field '") + key + "'");
  }
  return it->get<double>();
}

double field_or(const Json& obj, const char* key, double fallback) {
  const auto it = obj.find(key);
  return it != obj.end() && it->is_number() ? it->get<double>() : fallback;
}

Json to_json(const gbm::GbmParams& p) { return {{"mu", p.mu}, {"sigma", p.sigma}}; }
Json to_json(const garch::NgarchParams& p) {
  return {{"mu", p.mu},       {"omega", p.omega}, {"alpha", p.alpha},
          {"beta", p.beta},   {"gamma", p.gamma}, {"sigma0_sq", p.sigma0_sq}};
}
Json to_json(const jumps::JumpGbmParams& p) {
  return {{"mu", p.mu}, {"sigma", p.sigma}, {"lambda", p.lambda}, {"mu_y", p.mu_y}, {"sigma_y", p.sigma_y}};
}
Json to_json(const subordinated::VgParams& p) {
  return {{"mu_bar", p.mu_bar}, {"theta_bar", p.theta_bar}, {"sigma_bar", p.sigma_bar}, {"nu", p.nu}};
}
Json to_json(const subordinated::NigParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"delta", p.delta}, {"mu", p.mu}};
}
Json to_json(const meanrev::VasicekParams& p) {
  return {{"alpha", p.alpha}, {"theta", p.theta}, {"sigma", p.sigma}};
}
Json to_json(const meanrev::CirParams& p) {
  return {{"alpha", p.alpha}, {"theta", p.theta}, {"sigma", p.sigma}};
}
Json to_json(const meanrev_jumps::JumpVasicekParams& p) {
  return {{"alpha", p.alpha},         {"theta", p.theta},     {"sigma", p.sigma},
          {"lambda_up", p.lambda_up}, {"mu_up", p.mu_up},     {"sigma_up", p.sigma_up},
          {"lambda_dn", p.lambda_dn}, {"mu_dn", p.mu_dn},     {"sigma_dn", p.sigma_dn}};
}

gbm::GbmParams gbm_from(const Json& j) { return {field(j, "mu"), field(j, "sigma")}; }
garch::NgarchParams ngarch_from(const Json& j) {
  garch::NgarchParams p{field(j, "mu"), field(j, "omega"), field(j, "alpha"),
                        field(j, "beta"), field_or(j, "gamma", 0.0), 0.0};
  p.sigma0_sq = field_or(j, "sigma0_sq", 0.0);
  if (!(p.sigma0_sq > 0.0)) p.sigma0_sq = garch::stationary_variance(p);
  return p;
}
jumps::JumpGbmParams jumps_from(const Json& j) {
  return {field(j, "mu"), field(j, "sigma"), field(j, "lambda"), field(j, "mu_y"), field(j, "sigma_y")};
}
subordinated::VgParams vg_from(const Json& j) {
  return {field(j, "mu_bar"), field(j, "theta_bar"), field(j, "sigma_bar"), field(j, "nu")};
}
subordinated::NigParams nig_from(const Json& j) {
  return {field(j, "alpha"), field(j, "beta"), field(j, "delta"), field(j, "mu")};
}
meanrev::VasicekParams vasicek_from(const Json& j) {
  return {field(j, "alpha"), field(j, "theta"), field(j, "sigma")};
}
meanrev::CirParams cir_from(const Json& j) {
  return {field(j, "alpha"), field(j, "theta"), field(j, "sigma")};
}
meanrev_jumps::JumpVasicekParams jump_vasicek_from(const Json& j) {
  return {field(j, "alpha"),
          field(j, "theta"),
          field(j, "sigma"),
          field(j, "lambda_up"),
          field(j, "mu_up"),
          field(j, "sigma_up"),
          field_or(j, "lambda_dn", 0.0),
          field_or(j, "mu_dn", 0.0),
          field_or(j, "sigma_dn", 0.0)};
}

// ---- output ---------------------------------------------------------------

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, io::format_number(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else if (j.is_null()) {
    rows.emplace_back(prefix, "");
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

std::string key_value_csv(const Json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::string out = "key,value\n";
  for (const auto& [k, v] : rows) out += k + "," + v + "\n";
  return out;
}

double finite_or_nan(double v) { return std::isfinite(v) ? v : std::nan(""); }

class Writer {
 public:
  Writer(const RunConfig& config, std::ostream& out) : dir_(config.output_dir), out_(out) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::IoError, kModule, "cannot create output directory " + config.output_dir);
  }

  void text(const std::string& file, std::string_view content) {
    const std::string path = (std::filesystem::path(dir_) / file).string();
    io::write_file(path, content);
    out_ << "wrote " << path << "\n";
  }

  void json(const std::string& file, const Json& j) { text(file, j.dump(2) + "\n"); }

 private:
  std::string dir_;
  std::ostream& out_;
};

void emit(Writer& w, const RunConfig& config, const std::string& stem, const Json& j) {
  if (config.format == Format::Json) {
    w.json(stem + ".json", j);
  } else {
    w.text(stem + ".csv", key_value_csv(j));
  }
}

Json header(const RunConfig& config) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = std::string(to_string(config.command));
  if (config.model) j["model"] = std::string(to_string(*config.model));
  return j;
}

// ---- input ----------------------------------------------------------------

TimeSeries load_series(const RunConfig& config) {
  if (config.input_path.empty()) {
    fail(ErrorCode::InvalidParam, kModule, std::string(to_string(config.command)) + " needs --input");
  }
  return io::ingest_csv(config.input_path, config.dt).series;
}

Model need_model(const RunConfig& config) {
  if (!config.model) {
    fail(ErrorCode::InvalidParam, kModule, std::string(to_string(config.command)) + " needs --model");
  }
  return *config.model;
}

// ---- calibrate ------------------------------------------------------------

template <class P>
void fill_result(Json& j, const CalibrationResult<P>& r, std::size_t k,
                 const std::vector<const char*>& se_names) {
  j["params"] = to_json(r.params);
  j["log_likelihood"] = r.log_likelihood;
  j["aic"] = aic(r.log_likelihood, k);
  j["n_params"] = k;
  j["initial_guess"] = to_json(r.initial_guess);
  j["initial_log_likelihood"] = finite_or_nan(r.initial_log_likelihood);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  if (r.stderr_estimates && r.stderr_estimates->size() == se_names.size()) {
    Json se;
    for (std::size_t i = 0; i < se_names.size(); ++i) se[se_names[i]] = (*r.stderr_estimates)[i];
    j["stderr"] = se;
  } else {
    j["stderr"] = nullptr;
  }
}

// Fit record for one model; its "params" member feeds simulate.
Json calibrate_record(Model m, const TimeSeries& series) {
  Json j;
  const auto x = series.values();
  const double dt = series.dt();
  j["n"] = series.size();
  j["dt"] = dt;
  switch (m) {
    case Model::Gbm:
      fill_result(j, gbm::calibrate(to_log_returns(series)), 2, {"mu", "sigma"});
      break;
    case Model::Ngarch: {
      std::vector<double> r(x.size() - 1);
      for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i - 1] > 0.0)) fail(ErrorCode::NonPositiveLevel, kModule, "ngarch needs positive levels");
        r[i - 1] = x[i] / x[i - 1] - 1.0;
      }
      const auto fit = garch::calibrate(r, dt);
      fill_result(j, fit, 5, {});
      j["persistence"] = garch::persistence(fit.params);
      break;
    }
    case Model::Jumps:
      fill_result(j, jumps::calibrate(to_log_returns(series)), 5, {});
      break;
    case Model::Vg:
      fill_result(j, subordinated::vg_calibrate(to_log_returns(series)), 4, {});
      break;
    case Model::Nig:
      fill_result(j, subordinated::nig_calibrate(to_log_returns(series)), 4, {});
      break;
    case Model::Vasicek:
      fill_result(j, meanrev::vasicek_calibrate_mle(x, dt), 3, {"alpha", "theta", "sigma"});
      break;
    case Model::ExpVasicek: {
      const auto fit = meanrev::exp_vasicek_calibrate(x, dt);
      fill_result(j, fit.log_fit, 3, {"alpha", "theta", "sigma"});
      j["m"] = fit.m;
      break;
    }
    case Model::Cir: {
      const auto fit = meanrev::cir_calibrate(x, dt);
      fill_result(j, fit.result, 3, {"alpha", "theta", "sigma"});
      j["feller_satisfied"] = fit.feller_satisfied;
      break;
    }
    case Model::JumpVasicek:
      fill_result(j, meanrev_jumps::calibrate(x, dt, false), 6, {});
      break;
    case Model::JumpVasicek2:
      fill_result(j, meanrev_jumps::calibrate(x, dt, true), 9, {});
      break;
  }
  return j;
}

void run_calibrate(const RunConfig& config, std::ostream& out) {
  const Model m = need_model(config);
  const TimeSeries series = load_series(config);
  Json j = header(config);
  j.update(calibrate_record(m, series));
  Writer w(config, out);
  emit(w, config, "calibration", j);
}

// ---- simulate -------------------------------------------------------------

double empirical_quantile(std::vector<double>& v, double p) {
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

PathSet simulate_model(Model m, const Json& p, double s0, std::size_t steps, std::size_t paths,
                       double dt, const RngStream& rng) {
  switch (m) {
    case Model::Gbm: return gbm::simulate(gbm_from(p), s0, steps, paths, dt, rng);
    case Model::Ngarch: return garch::simulate(ngarch_from(p), s0, steps, paths, dt, rng).levels;
    case Model::Jumps: return jumps::simulate(jumps_from(p), s0, steps, paths, dt, rng);
    case Model::Vg: return subordinated::vg_simulate(vg_from(p), s0, steps, paths, dt, rng);
    case Model::Nig: return subordinated::nig_simulate(nig_from(p), s0, steps, paths, dt, rng);
    case Model::Vasicek: return meanrev::vasicek_simulate(vasicek_from(p), s0, steps, paths, dt, rng);
    case Model::ExpVasicek:
      return meanrev::exp_vasicek_simulate(vasicek_from(p), s0, steps, paths, dt, rng);
    case Model::Cir:
      return meanrev::cir_simulate(cir_from(p), s0, steps, paths, dt, rng, Scheme::Exact);
    case Model::JumpVasicek:
    case Model::JumpVasicek2:
      return meanrev_jumps::simulate(jump_vasicek_from(p), s0, steps, paths, dt, rng);
  }
  fail(ErrorCode::InvalidParam, kModule, "unknown model");
}

double default_start(Model m, const Json& p) {
  if (!is_rate_model(m)) return 100.0;
  const double theta = field(p, "theta");
  return m == Model::ExpVasicek ? std::exp(theta) : theta;
}

void run_simulate(const RunConfig& config, std::ostream& out) {
  const Model m = need_model(config);
  Json params;
  std::optional<double> last;
  std::string source;
  if (!config.params_path.empty()) {
    try {
      params = Json::parse(io::read_file(config.params_path));
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, kModule, "params file: " + std::string(e.what()));
    }
    if (params.contains("params")) params = params["params"];
    if (!params.is_object()) fail(ErrorCode::ParseError, kModule, "params file must hold a JSON object");
    source = "params";
  } else if (!config.input_path.empty()) {
    const TimeSeries series = load_series(config);
    params = calibrate_record(m, series)["params"];
    last = series.values().back();
    source = "calibrated";
  } else {
    fail(ErrorCode::InvalidParam, kModule, "simulate needs --params or --input");
  }
  if (!config.input_path.empty() && !last) last = load_series(config).values().back();

  const double dt = config.dt;
  const std::size_t steps =
      config.n_steps ? config.n_steps : static_cast<std::size_t>(std::llround(config.horizon / dt));
  if (steps == 0) fail(ErrorCode::InvalidParam, kModule, "horizon shorter than one step");
  const double s0 = config.s0 ? *config.s0 : last ? *last : default_start(m, params);
  const RngStream rng(config.seed, 0);
  const PathSet ps = simulate_model(m, params, s0, steps, config.n_paths, dt, rng);

  std::string paths_csv = "step,t";
  for (std::size_t p = 0; p < ps.n_paths; ++p) paths_csv += ",path_" + std::to_string(p);
  paths_csv += "\n";
  std::vector<std::vector<double>> fan;
  std::vector<double> column(ps.n_paths);
  for (std::size_t i = 0; i <= ps.n_steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    paths_csv += std::to_string(i) + "," + io::format_number(t);
    for (std::size_t p = 0; p < ps.n_paths; ++p) {
      column[p] = ps.at(p, i);
      paths_csv += "," + io::format_number(column[p]);
    }
    paths_csv += "\n";
    std::vector<double> row = {static_cast<double>(i), t};
    for (double q : kFanLevels) row.push_back(empirical_quantile(column, q));
    fan.push_back(std::move(row));
  }

  Writer w(config, out);
  w.text("paths.csv", paths_csv);
  w.text("fan.csv", io::csv_table({"step", "t", "p05", "p25", "p50", "p75", "p95"}, fan));
  Json j = header(config);
  j["params_source"] = source;
  j["params"] = params;
  j["s0"] = s0;
  j["dt"] = dt;
  j["n_steps"] = ps.n_steps;
  j["n_paths"] = ps.n_paths;
  j["seed"] = ps.seed;
  j["scheme"] = std::string(to_string(ps.scheme));
  emit(w, config, "simulation", j);
}

// ---- diagnose -------------------------------------------------------------

void run_diagnose(const RunConfig& config, std::ostream& out) {
  const TimeSeries series = load_series(config);
  const auto x = series.values();
  const bool positive = std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; });
  std::vector<double> inc;
  if (positive) {
    inc = to_log_returns(series).values;
  } else {
    for (std::size_t i = 1; i < x.size(); ++i) inc.push_back(x[i] - x[i - 1]);
  }
  const auto mom = diagnostics::moment_summary(inc);
  const auto adf = diagnostics::adf_test(x, config.adf_lags);
  const std::size_t lags = std::min(config.acf_lags, (inc.size() - 1) / 2);
  const auto acf = diagnostics::acf(inc, lags);
  const auto pacf = diagnostics::pacf(inc, lags);
  const auto qq = diagnostics::qq_data(
      inc, diagnostics::NormalReference{mom.mean, std::sqrt(mom.variance)});

  Json j = header(config);
  j["n"] = series.size();
  j["dt"] = series.dt();
  j["increments"] = positive ? "log_returns" : "differences";
  j["moments"] = {{"n", mom.n},
                  {"mean", mom.mean},
                  {"variance", mom.variance},
                  {"skewness", mom.skewness},
                  {"excess_kurtosis", mom.excess_kurtosis}};
  j["adf"] = {{"statistic", adf.statistic},    {"coefficient", adf.coefficient},
              {"lags", adf.lags},              {"n_obs", adf.n_obs},
              {"critical_1pct", adf.critical_1pct}, {"critical_5pct", adf.critical_5pct},
              {"reject_1pct", adf.reject_1pct}, {"reject_5pct", adf.reject_5pct}};

  std::vector<std::vector<double>> acf_rows;
  std::vector<std::vector<double>> pacf_rows;
  for (std::size_t k = 0; k <= lags; ++k) {
    acf_rows.push_back({static_cast<double>(k), acf[k]});
    pacf_rows.push_back({static_cast<double>(k), pacf[k]});
  }
  std::vector<std::vector<double>> qq_rows;
  for (const auto& q : qq) qq_rows.push_back({q.theoretical, q.sample});

  Writer w(config, out);
  emit(w, config, "diagnose", j);
  w.text("acf.csv", io::csv_table({"lag", "acf"}, acf_rows));
  w.text("pacf.csv", io::csv_table({"lag", "pacf"}, pacf_rows));
  w.text("qq.csv", io::csv_table({"theoretical", "sample"}, qq_rows));
}

// ---- risk -----------------------------------------------------------------

void run_risk(const RunConfig& config, std::ostream& out) {
  const TimeSeries series = load_series(config);
  std::vector<double> losses;
  if (config.losses == LossSource::Values) {
    losses.assign(series.values().begin(), series.values().end());
  } else {
    for (double r : to_log_returns(series).values) losses.push_back(-r);
  }
  evt::PotOptions opt;
  if (config.threshold) {
    opt.policy = evt::ExplicitThreshold{*config.threshold};
  } else {
    opt.policy = evt::QuantilePolicy{config.threshold_q};
  }
  opt.n_bootstrap = config.n_bootstrap;
  opt.seed = config.seed;
  const auto rep = evt::pot_pipeline(losses, config.p_levels, opt);

  Writer w(config, out);
  const bool has_ci = rep.var_ci.size() == rep.p_levels.size();
  if (config.format == Format::Csv) {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < rep.p_levels.size(); ++k) {
      const double nan = std::nan("");
      rows.push_back({rep.p_levels[k], rep.var_p[k], rep.es_p[k],
                      has_ci ? rep.var_ci[k].lo : nan, has_ci ? rep.var_ci[k].hi : nan,
                      has_ci ? rep.es_ci[k].lo : nan, has_ci ? rep.es_ci[k].hi : nan, rep.u,
                      static_cast<double>(rep.n), static_cast<double>(rep.n_exceed), rep.gpd.xi,
                      rep.gpd.beta});
    }
    w.text("risk.csv", io::csv_table({"p", "var", "es", "var_lo", "var_hi", "es_lo", "es_hi", "u",
                                      "n", "n_exceed", "xi", "beta"},
                                     rows));
    return;
  }
  Json j = header(config);
  j["losses"] = config.losses == LossSource::Values ? "values" : "neg_log_returns";
  j["u"] = rep.u;
  j["n"] = rep.n;
  j["n_exceed"] = rep.n_exceed;
  j["gpd"] = {{"xi", rep.gpd.xi}, {"beta", rep.gpd.beta}};
  j["log_likelihood"] = rep.log_likelihood;
  j["n_bootstrap"] = rep.n_bootstrap;
  Json rows = Json::array();
  for (std::size_t k = 0; k < rep.p_levels.size(); ++k) {
    Json r = {{"p", rep.p_levels[k]}, {"var", rep.var_p[k]}, {"es", rep.es_p[k]}};
    if (has_ci) {
      r["var_ci"] = {rep.var_ci[k].lo, rep.var_ci[k].hi};
      r["es_ci"] = {rep.es_ci[k].lo, rep.es_ci[k].hi};
    }
    rows.push_back(r);
  }
  j["levels"] = rows;
  w.json("risk.json", j);
}

// ---- select ---------------------------------------------------------------

void run_select(const RunConfig& config, std::ostream& out) {
  using namespace model_select;
  const TimeSeries series = load_series(config);
  const Report rep = model_select_report(series, config.adf_lags);

  auto cell_families = [](bool mr, bool fat) {
    Json names = Json::array();
    for (Family f : {Family::Abm, Family::Gbm, Family::Ngarch, Family::Jumps, Family::Vg,
                     Family::Nig, Family::Vasicek, Family::ExpVasicek, Family::Cir,
                     Family::JumpVasicek}) {
      if (mean_reverting(f) == mr && fat_tailed(f) == fat) names.push_back(std::string(name(f)));
    }
    return names;
  };

  Json j = header(config);
  j["n"] = rep.n;
  j["adf_statistic"] = rep.adf.statistic;
  j["mean_reversion"] = rep.mean_reversion;
  j["excess_kurtosis"] = rep.excess_kurtosis;
  j["kurtosis_threshold"] = rep.kurtosis_threshold;
  j["fat_tails"] = rep.fat_tails;
  j["winner"] = rep.has_winner ? Json(std::string(name(rep.winner))) : Json(nullptr);
  Json table = Json::array();
  for (bool mr : {false, true}) {
    for (bool fat : {false, true}) {
      table.push_back({{"mean_reversion", mr},
                       {"fat_tails", fat},
                       {"families", cell_families(mr, fat)},
                       {"selected", rep.has_winner && mean_reverting(rep.winner) == mr &&
                                        fat_tailed(rep.winner) == fat}});
    }
  }
  j["table"] = table;
  Json cands = Json::array();
  for (const auto& c : rep.ranked) {
    Json cj = {{"family", std::string(name(c.family))}, {"fitted", c.fitted}};
    if (c.fitted) {
      cj["log_likelihood"] = c.log_likelihood;
      cj["aic"] = c.aic;
      Json p;
      for (const auto& [k, v] : c.params) p[k] = v;
      cj["params"] = p;
    } else {
      cj["error"] = c.error;
    }
    cands.push_back(cj);
  }
  j["candidates"] = cands;

  Writer w(config, out);
  emit(w, config, "selection", j);

  auto mark = [&](bool mr, bool fat) {
    const bool sel = rep.has_winner && mean_reverting(rep.winner) == mr && fat_tailed(rep.winner) == fat;
    return std::string(sel ? "[*]" : "[ ]");
  };
  out << "                      normal tails   fat tails\n";
  out << "no mean reversion     " << mark(false, false) << "            " << mark(false, true) << "\n";
  out << "mean reversion        " << mark(true, false) << "            " << mark(true, true) << "\n";
  for (const auto& c : rep.ranked) {
    out << "  " << name(c.family);
    if (c.fitted) {
      out << "  aic=" << io::format_number(c.aic) << "\n";
    } else {
      out << "  failed: " << c.error << "\n";
    }
  }
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Diagnose: return "diagnose";
    case Command::Calibrate: return "calibrate";
    case Command::Simulate: return "simulate";
    case Command::Risk: return "risk";
    case Command::Select: return "select";
  }
  return "?";
}

std::string_view to_string(Model m) {
  for (const auto& nm : kModels) {
    if (nm.model == m) return nm.name;
  }
  return "?";
}

std::optional<Model> parse_model(std::string_view s) {
  for (const auto& nm : kModels) {
    if (nm.name == s) return nm.model;
  }
  return std::nullopt;
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& nm : kModels) out.emplace_back(nm.name);
  return out;
}

void validate(const RunConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
    fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
  }
  for (double p : config.p_levels) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidProbability, kModule, "p levels must lie in (0, 1)");
  }
  if (!(config.threshold_q > 0.0 && config.threshold_q < 1.0)) {
    fail(ErrorCode::InvalidProbability, kModule, "threshold quantile must lie in (0, 1)");
  }
  if (config.command == Command::Simulate) {
    if (config.n_paths == 0) fail(ErrorCode::InvalidParam, kModule, "need at least one path");
    if (!(config.horizon > 0.0)) fail(ErrorCode::InvalidParam, kModule, "horizon must be positive");
  }
  for (const std::string* path : {&config.input_path, &config.params_path}) {
    if (!path->empty() && !std::filesystem::is_regular_file(*path)) {
      fail(ErrorCode::IoError, kModule, "no such file: " + *path);
    }
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    switch (config.command) {
      case Command::Diagnose: run_diagnose(config, out); break;
      case Command::Calibrate: run_calibrate(config, out); break;
      case Command::Simulate: run_simulate(config, out); break;
      case Command::Risk: run_risk(config, out); break;
      case Command::Select: run_select(config, out); break;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_status(e.code());
  }
}

}  // namespace stochcal::cli
