#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capm/bounds.hpp"
#include "capm/experiment.hpp"
#include "capm/moments.hpp"

namespace capm::cli {

struct LedgerEntry {
  std::string policy;
  double capital = 1.0;
};

struct RestrictionDiagnostics {
  double max_abs_s = 0.0;
  double max_abs_m = 0.0;
  std::size_t clamp_count = 0;
  double log_horizon = 0.0;        // ln T
  double inv_sqrt_dt = 0.0;        // dt^(-1/2)
  bool increment_condition = true;  // ln T <= dt^(-1/2)
  std::vector<std::string> violations;
};

// Everything one simulate/analyze run produces.
struct RunReport {
  std::string command;
  nlohmann::json config;
  MomentSummary summary;
  double capm_residual = 0.0;
  double deficit_residual = 0.0;
  double alpha = 0.0;
  BoundChoice upper_bound;  // ε-optimized over the default grid
  BoundChoice lower_bound;
  SandwichGaps sandwich;
  PredictionReport prediction;  // at the requested ε
  bool witness_verdict_two_sided = false;
  RestrictionDiagnostics restriction;
  double investor_capital = 1.0;
  double index_capital = 1.0;
  std::vector<LedgerEntry> speculators;
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;  // excluded from determinism
};

nlohmann::json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VerifyReport& report);

// Aligned two-column text for terminals.
std::string format_table(const RunReport& report);
std::string format_table(const VerifyReport& report);

// Doubles are stored as numbers when finite, as "inf"/"-inf"/"nan" otherwise.
nlohmann::json number(double v);
double number_from(const nlohmann::json& j);

}  // namespace capm::cli
