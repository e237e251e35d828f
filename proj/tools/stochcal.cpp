#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "stochcal/cli.hpp"

using stochcal::cli::Command;
using stochcal::cli::Format;
using stochcal::cli::LossSource;
using stochcal::cli::Model;
using stochcal::cli::RunConfig;

namespace {

void add_common(CLI::App* sub, RunConfig& cfg, std::string& freq, double& dt) {
  sub->add_option("--input,-i", cfg.input_path, "CSV of ISO date, value");
  sub->add_option("--freq", freq, "Observation frequency")
      ->check(CLI::IsMember({"daily", "weekly"}));
  sub->add_option("--dt", dt, "Step in years; overrides --freq")->check(CLI::PositiveNumber);
  sub->add_option("--out,-o", cfg.output_dir, "Output directory");
  sub->add_option("--format", cfg.format, "Artifact format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"json", Format::Json},
                                                                        {"csv", Format::Csv}}));
  sub->add_option("--seed", cfg.seed, "RNG seed");
}

void add_model(CLI::App* sub, std::string& model, bool required) {
  auto* opt = sub->add_option("--model,-m", model, "Model family")
                  ->check(CLI::IsMember(stochcal::cli::model_names()));
  if (required) opt->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic process calibration, simulation and tail risk"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string freq = "daily";
  double dt = 0.0;
  std::string model;
  double s0 = 0.0;
  double threshold = 0.0;
  std::string losses = "returns";

  auto* diagnose = app.add_subcommand("diagnose", "Moments, ACF/PACF, ADF test and QQ data");
  add_common(diagnose, cfg, freq, dt);
  diagnose->add_option("--lags", cfg.acf_lags, "ACF/PACF lags");
  diagnose->add_option("--adf-lags", cfg.adf_lags, "Lagged differences in the ADF regression");

  auto* calibrate = app.add_subcommand("calibrate", "Maximum-likelihood fit of one model");
  add_common(calibrate, cfg, freq, dt);
  add_model(calibrate, model, true);

  auto* simulate = app.add_subcommand("simulate", "Sample paths and percentile fan");
  add_common(simulate, cfg, freq, dt);
  add_model(simulate, model, true);
  simulate->add_option("--params", cfg.params_path, "JSON parameters (or a calibration file)")
      ;
  simulate->add_option("--paths", cfg.n_paths, "Number of paths");
  simulate->add_option("--steps", cfg.n_steps, "Steps per path (default horizon / dt)");
  simulate->add_option("--horizon", cfg.horizon, "Horizon in years");
  auto* s0_opt = simulate->add_option("--s0", s0, "Initial level");

  auto* risk = app.add_subcommand("risk", "Peaks-over-threshold VaR and ES");
  add_common(risk, cfg, freq, dt);
  risk->add_option("--p", cfg.p_levels, "Tail probabilities")->expected(1, -1);
  risk->add_option("--losses", losses, "Loss source")->check(CLI::IsMember({"returns", "values"}));
  auto* thr_opt = risk->add_option("--threshold", threshold, "Explicit threshold u");
  risk->add_option("--threshold-q", cfg.threshold_q, "Threshold quantile when u is not given");
  risk->add_option("--bootstrap", cfg.n_bootstrap, "Bootstrap resamples for intervals (0 disables)");

  auto* select = app.add_subcommand("select", "Screen, fit admissible families, rank by AIC");
  add_common(select, cfg, freq, dt);
  select->add_option("--adf-lags", cfg.adf_lags, "Lagged differences in the ADF regression");

  CLI11_PARSE(app, argc, argv);

  if (diagnose->parsed()) cfg.command = Command::Diagnose;
  if (calibrate->parsed()) cfg.command = Command::Calibrate;
  if (simulate->parsed()) cfg.command = Command::Simulate;
  if (risk->parsed()) cfg.command = Command::Risk;
  if (select->parsed()) cfg.command = Command::Select;

  cfg.dt = dt > 0.0 ? dt : freq == "weekly" ? stochcal::kWeeklyDt : stochcal::kDailyDt;
  if (!model.empty()) cfg.model = stochcal::cli::parse_model(model);
  if (*s0_opt) cfg.s0 = s0;
  if (*thr_opt) cfg.threshold = threshold;
  cfg.losses = losses == "values" ? LossSource::Values : LossSource::NegLogReturns;

  return stochcal::cli::run(cfg, std::cout, std::cerr);
}
