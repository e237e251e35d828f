#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stochcal/core.hpp"
#include "stochcal/diagnostics.hpp"

namespace stochcal::model_select {

enum class Family { Abm, Gbm, Ngarch, Jumps, Vg, Nig, Vasicek, ExpVasicek, Cir, JumpVasicek };

std::string_view name(Family f);
bool mean_reverting(Family f);
bool fat_tailed(Family f);
/// Free parameters counted by AIC.
std::size_t parameter_count(Family f);

struct Candidate {
  Family family = Family::Abm;
  bool fitted = false;
  /// Qualified error name and message when the fit threw.
  std::string error;
  /// Log-likelihood of the observed levels (return models carry the
  /// change-of-variables Jacobian), so every candidate is comparable.
  double log_likelihood = 0.0;
  double aic = 0.0;
  std::vector<std::pair<std::string, double>> params;
};

struct Report {
  std::size_t n = 0;
  diagnostics::AdfReport adf;
  double excess_kurtosis = 0.0;
  double kurtosis_threshold = 0.0;
  bool mean_reversion = false;
  bool fat_tails = false;
  /// Fitted candidates by increasing AIC, then failures.
  std::vector<Candidate> ranked;
  bool has_winner = false;
  Family winner = Family::Abm;
};

/// Screens the series (ADF at 5%; excess kurtosis of the increments above
/// 3 sqrt(24/n)), fits every family admissible under the screens, and ranks
/// by AIC. Failed fits are listed, never thrown. Needs n >= 300.
Report model_select_report(const TimeSeries& x, std::size_t adf_lags = 1);

}  // namespace stochcal::model_select
