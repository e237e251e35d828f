#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stochcal/core.hpp"

namespace stochcal::cli {

enum class Command { Diagnose, Calibrate, Simulate, Risk, Select };

enum class Model {
  Gbm,
  Ngarch,
  Jumps,
  Vg,
  Nig,
  Vasicek,
  ExpVasicek,
  Cir,
  JumpVasicek,
  JumpVasicek2,
};

enum class Format { Json, Csv };

/// Where risk losses come from: minus the log returns of the input levels,
/// or the input values taken as losses directly.
enum class LossSource { NegLogReturns, Values };

std::string_view to_string(Command c);
std::string_view to_string(Model m);
std::optional<Model> parse_model(std::string_view s);
std::vector<std::string> model_names();

struct RunConfig {
  Command command = Command::Diagnose;
  std::optional<Model> model;
  std::string input_path;
  /// JSON object of parameters for simulate; a calibrate output file works too.
  std::string params_path;
  double dt = kDailyDt;
  std::uint64_t seed = 1;
  std::size_t n_paths = 100;
  /// 0 means round(horizon / dt).
  std::size_t n_steps = 0;
  double horizon = 1.0;
  /// Start level for simulate; defaults to the last input value.
  std::optional<double> s0;
  std::vector<double> p_levels{0.01};
  std::string output_dir = ".";
  Format format = Format::Json;
  std::size_t acf_lags = 20;
  std::size_t adf_lags = 1;
  LossSource losses = LossSource::NegLogReturns;
  std::optional<double> threshold;
  double threshold_q = 0.9;
  std::size_t n_bootstrap = 1000;
};

/// Throws InvalidParam for inconsistent settings and IoError for missing files.
void validate(const RunConfig& config);

/// Executes one command, writing artifacts under output_dir and their paths
/// to out. Library errors go to err as "error: <module>.<Code>: <message>"
/// and the return value is exit_status of the code; 0 on success.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace stochcal::cli
