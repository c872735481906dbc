#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "capm/moments.hpp"
#include "capm/strategies.hpp"
#include "capm/types.hpp"

namespace capm {

// Envelope of the cubic Taylor remainder of ln(1+x):
//   remainder_lower(x) <= ln(1+x) - x + x^2/2 <= remainder_upper(x)
// Both are increasing on (-1, inf) and vanish at 0.

// γ(x) = (1/3) (x / (1+x))^3. Throws DomainError for x <= -1.
double remainder_lower(double x);

// Γ(x) = (1/3) x^3
double remainder_upper(double x) noexcept;

// Upper bound on the CAPM residual certified by the blend(ε) witness at
// level α, evaluated on the path's statistics. 0 < ε < 1, α > 0.
double prop1_upper_bound(const MomentSummary& sum, double epsilon, double alpha);

// Lower bound certified by the short-blend(ε) witness. 0 < ε < 1/3, α > 0.
double prop1_lower_bound(const MomentSummary& sum, double epsilon, double alpha);

// 25 log-spaced values in [1e-3, 0.33].
std::vector<double> default_epsilon_grid();

struct BoundChoice {
  double epsilon = 0.0;
  double bound = 0.0;
};

// Smallest upper bound / largest lower bound over the grid.
BoundChoice tightest_upper_bound(const MomentSummary& sum, double alpha,
                                 std::span<const double> grid);
BoundChoice tightest_lower_bound(const MomentSummary& sum, double alpha,
                                 std::span<const double> grid);

// Two-sided enclosure of the deficit residual D by the CAPM residual R:
//   R - lower_slack <= D <= R + upper_slack
// with upper_slack = (1/T)(ΣΓ(s) + Σ|γ(m)|), lower_slack = (1/T)(Σ|γ(s)| + ΣΓ(m)).
struct SandwichGaps {
  double lower_gap = 0.0;  // D - (R - lower_slack)
  double upper_gap = 0.0;  // (R + upper_slack) - D
  double lower_slack = 0.0;
  double upper_slack = 0.0;
};

SandwichGaps prop2_sandwich(const MomentSummary& sum) noexcept;

// ---------------------------------------------------------------------------
// Completed plays and witness checks

struct SpeculatorLedger {
  SpeculatorPolicy policy;
  double capital = 1.0;
};

struct PlayRecord {
  MomentSummary summary;
  double investor_capital = 1.0;
  double index_capital = 1.0;
  std::vector<SpeculatorLedger> speculators;
  std::size_t clamp_count = 0;
  std::vector<std::string> restriction_violations;

  // Throws ConfigError when no ledger for the policy was recorded.
  const SpeculatorLedger& ledger(const SpeculatorPolicy& policy) const;
};

// Relative slack applied to every implication check.
inline constexpr double kImplicationSlack = 1e-12;

struct WitnessVerdict {
  bool holds = false;
  bool capital_clause = false;  // H_N >= M_N / α
  bool event_clause = false;    // the predicted inequality
  double residual = 0.0;
  double bound = 0.0;
  double capital_ratio = 0.0;  // H_N / M_N
  // Signed distance by which the event clause holds (negative = fails).
  double margin = 0.0;
};

// True iff H_N(blend ε) >= M_N/α or residual < prop1_upper_bound.
// bound_scale multiplies the bound (1 in normal use).
WitnessVerdict verify_witness_upper(const PlayRecord& play, double epsilon, double alpha,
                                    double bound_scale = 1.0);

// True iff H_N(short-blend ε) >= M_N/α or residual > prop1_lower_bound.
WitnessVerdict verify_witness_lower(const PlayRecord& play, double epsilon, double alpha,
                                    double bound_scale = 1.0);

// The equal split of the two witnesses at level α: either the split ledger
// reaches M_N/α, or the residual lies strictly inside the level-α/2 bounds.
WitnessVerdict verify_witness_two_sided(const PlayRecord& play, double epsilon, double alpha,
                                        double bound_scale = 1.0);

SpeculatorPolicy equal_split(double epsilon);

struct PredictionReport {
  double epsilon = 0.0;
  double alpha = 0.0;
  double capm_residual = 0.0;
  double deficit_residual = 0.0;
  double upper_bound_p1 = 0.0;
  double lower_bound_p1 = 0.0;
  double p2_upper_slack = 0.0;
  double p2_lower_slack = 0.0;
  double speculator_terminal_ratio_blend = 0.0;
  double speculator_terminal_ratio_short = 0.0;
  bool witness_verdict_upper = false;
  bool witness_verdict_lower = false;
};

// Needs blend(ε) and short-blend(ε) ledgers; 0 < ε < 1/3.
PredictionReport predict(const PlayRecord& play, double epsilon, double alpha);

}  // namespace capm
