#include "capm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include "capm/errors.hpp"

namespace capm {

std::vector<SpeculatorPolicy> witness_policies(const std::vector<double>& epsilons,
                                               bool include_split) {
  std::vector<SpeculatorPolicy> out;
  for (double eps : epsilons) {
    out.push_back(SpeculatorPolicy::blend(eps));
    if (eps < 1.0 / 3.0) {
      out.push_back(SpeculatorPolicy::short_blend(eps));
      if (include_split) out.push_back(equal_split(eps));
    }
  }
  if (out.empty()) out.push_back(SpeculatorPolicy::hold_index());
  return out;
}

WitnessGame play_witness_game(const WitnessGameSpec& spec) {
  const auto policies = witness_policies(spec.epsilons, spec.include_split);
  std::vector<std::unique_ptr<Speculator>> owned;
  std::vector<Speculator*> players;
  for (const auto& p : policies) {
    owned.push_back(make_speculator(p));
    players.push_back(owned.back().get());
  }
  auto investor = make_investor(spec.investor);
  auto market = make_market(spec.market, spec.config);

  GameResult result = run_game(spec.config, *investor, players, *market, spec.thresholds);

  PlayRecord record;
  record.summary = result.moments.summarize();
  record.investor_capital = result.state.investor_capital();
  record.index_capital = result.state.index_capital();
  const auto capitals = result.state.speculator_capitals();
  for (std::size_t j = 0; j < policies.size(); ++j) {
    record.speculators.push_back({policies[j], capitals[j]});
  }
  record.clamp_count = clamp_count(*market);
  record.restriction_violations = result.state.restriction().violations();
  return {std::move(record), std::move(result.state)};
}

ReturnSeries with_security_column(ReturnSeries series) {
  if (series.width() != 1) return series;
  series.labels.push_back(series.labels.front() + "_copy");
  for (auto& row : series.rows) row = ReturnVector{row.index(), row.index()};
  return series;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

unsigned thread_cap_from_env() {
  const char* env = std::getenv("CAPM_GAME_THREADS");
  if (env == nullptr) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v <= 0) return 0;
  return static_cast<unsigned>(v);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
  // splitmix64 over (seed, trial)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct TrialOutcome {
  enum class Status { kOk, kGuardTrip, kRejected } status = Status::kOk;
  std::optional<PlayRecord> record;
  std::string message;
};

}  // namespace

VerifyReport run_verification(const VerifySpec& spec) {
  for (double eps : spec.epsilons) {
    if (!(eps > 0.0 && eps < 1.0 / 3.0)) {
      throw ConfigError("verification epsilons must lie in (0, 1/3)");
    }
  }
  for (double a : spec.alphas) {
    if (!(a > 0.0)) throw ConfigError("verification alphas must be positive");
  }

  std::vector<TrialOutcome> outcomes(spec.trials);
  parallel_for(spec.trials, spec.threads, [&](std::size_t i) {
    WitnessGameSpec game;
    game.config = spec.config;
    game.investor = spec.investor;
    game.market = spec.market;
    if (game.market.kind == MarketModel::Kind::kGbm) {
      game.market.seed = trial_seed(spec.seed, i);
    }
    game.epsilons = spec.epsilons;
    TrialOutcome& out = outcomes[i];
    try {
      out.record = play_witness_game(game).record;
    } catch (const WitnessFailure& e) {
      out.status = TrialOutcome::Status::kGuardTrip;
      out.message = e.what();
    } catch (const InvestorBankrupt& e) {
      out.status = TrialOutcome::Status::kRejected;
      out.message = e.what();
    }
  });

  VerifyReport report;
  report.trials = spec.trials;
  report.min_lower_gap = std::numeric_limits<double>::infinity();
  report.min_upper_gap = std::numeric_limits<double>::infinity();
  for (double eps : spec.epsilons) {
    for (double a : spec.alphas) {
      VerifyCell cell;
      cell.epsilon = eps;
      cell.alpha = a;
      cell.min_upper_margin = std::numeric_limits<double>::infinity();
      cell.min_lower_margin = std::numeric_limits<double>::infinity();
      report.cells.push_back(cell);
    }
  }
  constexpr std::size_t kMaxFailures = 10;
  auto note = [&](std::string msg) {
    if (report.failures.size() < kMaxFailures) report.failures.push_back(std::move(msg));
  };

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const TrialOutcome& out = outcomes[i];
    if (out.status == TrialOutcome::Status::kGuardTrip) {
      ++report.guard_trips;
      note("trial " + std::to_string(i) + ": " + out.message);
      continue;
    }
    if (out.status == TrialOutcome::Status::kRejected) {
      ++report.rejected_paths;
      continue;
    }
    const PlayRecord& rec = *out.record;
    ++report.completed;
    report.clamps += rec.clamp_count;
    if (!rec.restriction_violations.empty()) ++report.restriction_flags;

    const SandwichGaps gaps = prop2_sandwich(rec.summary);
    report.min_lower_gap = std::min(report.min_lower_gap, gaps.lower_gap);
    report.min_upper_gap = std::min(report.min_upper_gap, gaps.upper_gap);
    if (gaps.lower_gap < -kSandwichSlack || gaps.upper_gap < -kSandwichSlack) {
      ++report.sandwich_violations;
      note("trial " + std::to_string(i) + ": deficit sandwich violated");
    }

    for (VerifyCell& cell : report.cells) {
      ++cell.checked;
      const auto up = verify_witness_upper(rec, cell.epsilon, cell.alpha, spec.bound_scale);
      const auto lo = verify_witness_lower(rec, cell.epsilon, cell.alpha, spec.bound_scale);
      const auto both = verify_witness_two_sided(rec, cell.epsilon, cell.alpha, spec.bound_scale);
      cell.upper_holds += up.holds;
      cell.lower_holds += lo.holds;
      cell.two_sided_holds += both.holds;
      cell.upper_by_capital += up.capital_clause;
      cell.lower_by_capital += lo.capital_clause;
      if (!up.capital_clause) cell.min_upper_margin = std::min(cell.min_upper_margin, up.margin);
      if (!lo.capital_clause) cell.min_lower_margin = std::min(cell.min_lower_margin, lo.margin);
      const std::string where = "trial " + std::to_string(i) + " eps=" +
                                std::to_string(cell.epsilon) + " alpha=" +
                                std::to_string(cell.alpha);
      if (!up.holds) {
        ++report.verdict_violations;
        note(where + ": upper witness implication failed");
      }
      if (!lo.holds) {
        ++report.verdict_violations;
        note(where + ": lower witness implication failed");
      }
      if (!both.holds) {
        ++report.verdict_violations;
        note(where + ": two-sided witness implication failed");
      }
    }
  }
  return report;
}

std::vector<ConvergenceRow> convergence_sweep(const ConvergenceSpec& spec) {
  if (spec.dts.empty()) throw ConfigError("convergence sweep needs at least one dt");
  const std::size_t per_seed = spec.dts.size();
  std::vector<ConvergenceRow> rows(spec.seeds.size() * per_seed);
  parallel_for(spec.seeds.size(), spec.threads, [&](std::size_t si) {
    const std::uint64_t seed = spec.seeds[si];
    const auto paths = matched_gbm_paths(spec.params, spec.horizon, spec.dts, seed);
    for (std::size_t d = 0; d < per_seed; ++d) {
      WitnessGameSpec game;
      game.config = GameConfig(spec.params.width() - 1, paths[d].size(), spec.dts[d]);
      game.investor = spec.investor;
      game.market = MarketModel::deterministic(paths[d]);
      const PlayRecord rec = play_witness_game(game).record;
      const BoundChoice up = tightest_upper_bound(rec.summary, spec.alpha, spec.epsilon_grid);
      const BoundChoice lo = tightest_lower_bound(rec.summary, spec.alpha, spec.epsilon_grid);
      ConvergenceRow& row = rows[si * per_seed + d];
      row.seed = seed;
      row.dt = spec.dts[d];
      row.rounds = rec.summary.rounds;
      row.capm_residual = capm_residual(rec.summary);
      row.upper_bound = up.bound;
      row.upper_epsilon = up.epsilon;
      row.lower_bound = lo.bound;
      row.lower_epsilon = lo.epsilon;
      row.max_abs_m = rec.summary.max_abs_m;
      row.max_abs_s = rec.summary.max_abs_s;
    }
  });
  return rows;
}

}  // namespace capm
