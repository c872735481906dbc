#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "capm/bounds.hpp"
#include "capm/ingest.hpp"
#include "capm/protocol.hpp"
#include "capm/strategies.hpp"

namespace capm {

// One play with the witness speculators attached: for every ε, blend(ε);
// for ε < 1/3 also short-blend(ε) and their equal split. With no ε the
// game carries a single hold-index speculator.
struct WitnessGameSpec {
  GameConfig config{1, 1, 1.0};
  InvestorPolicy investor;
  MarketModel market;
  std::vector<double> epsilons;
  bool include_split = true;
  RestrictionThresholds thresholds;
};

struct WitnessGame {
  PlayRecord record;
  GameState state;
};

std::vector<SpeculatorPolicy> witness_policies(const std::vector<double>& epsilons,
                                               bool include_split);

WitnessGame play_witness_game(const WitnessGameSpec& spec);

// Series with only an index column get a copy of it as security 1.
ReturnSeries with_security_column(ReturnSeries series);

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
// concurrency). Exceptions from fn are rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

// Reads CAPM_GAME_THREADS; returns 0 (= no cap) when unset or invalid.
unsigned thread_cap_from_env();

// Seed for trial i of a sweep rooted at `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept;

// ---------------------------------------------------------------------------
// Witness-implication sweep

struct VerifySpec {
  GameConfig config{1, 1, 1.0};
  InvestorPolicy investor;
  MarketModel market;  // GBM markets are reseeded per trial
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<double> epsilons{0.01, 0.1, 0.3};
  std::vector<double> alphas{0.5, 0.1, 0.01};
  double bound_scale = 1.0;  // test hook: 1 in honest runs
  unsigned threads = 0;
};

struct VerifyCell {
  double epsilon = 0.0;
  double alpha = 0.0;
  std::size_t checked = 0;
  std::size_t upper_holds = 0;
  std::size_t lower_holds = 0;
  std::size_t two_sided_holds = 0;
  std::size_t upper_by_capital = 0;
  std::size_t lower_by_capital = 0;
  double min_upper_margin = 0.0;  // over trials where the capital clause failed
  double min_lower_margin = 0.0;
};

struct VerifyReport {
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::size_t guard_trips = 0;        // short-blend / blend ledger went negative
  std::size_t rejected_paths = 0;     // Investor bankrupt: path outside the protocol
  std::size_t sandwich_violations = 0;
  std::size_t verdict_violations = 0;
  std::size_t clamps = 0;
  std::size_t restriction_flags = 0;  // trials with at least one flagged restriction
  double min_lower_gap = 0.0;
  double min_upper_gap = 0.0;
  std::vector<VerifyCell> cells;
  std::vector<std::string> failures;  // first few failure descriptions

  bool passed() const noexcept {
    return guard_trips == 0 && sandwich_violations == 0 && verdict_violations == 0;
  }
};

// Sandwich gaps below this are violations.
inline constexpr double kSandwichSlack = 1e-12;

VerifyReport run_verification(const VerifySpec& spec);

// ---------------------------------------------------------------------------
// Convergence sweep over dt at fixed horizon, matched driving noise

struct ConvergenceSpec {
  GbmParams params;
  InvestorPolicy investor;
  double horizon = 50.0;
  std::vector<double> dts{1e-2, 1e-3, 1e-4};
  std::vector<std::uint64_t> seeds{0};
  double alpha = 0.01;
  std::vector<double> epsilon_grid = default_epsilon_grid();
  unsigned threads = 0;
};

struct ConvergenceRow {
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::size_t rounds = 0;
  double capm_residual = 0.0;
  double upper_bound = 0.0;  // ε-optimized
  double upper_epsilon = 0.0;
  double lower_bound = 0.0;
  double lower_epsilon = 0.0;
  double max_abs_m = 0.0;
  double max_abs_s = 0.0;
};

// Rows ordered by seed, then by the order of dts.
std::vector<ConvergenceRow> convergence_sweep(const ConvergenceSpec& spec);

}  // namespace capm
