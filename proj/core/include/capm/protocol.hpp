#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "capm/moments.hpp"
#include "capm/types.hpp"

namespace capm {

// Investor's moves and Market's moves, one row per completed round.
// Speculator moves are deliberately absent.
class History {
 public:
  explicit History(std::size_t width) : width_(width) {}

  std::size_t size() const noexcept { return width_ == 0 ? 0 : market_.size() / width_; }
  bool empty() const noexcept { return market_.empty(); }
  std::size_t width() const noexcept { return width_; }

  // 0-based round index.
  std::span<const double> investor_move(std::size_t round) const;
  std::span<const double> market_move(std::size_t round) const;

  void reserve(std::size_t rounds);
  void append(const Weights& g, const ReturnVector& x);

 private:
  std::size_t width_;
  std::vector<double> investor_;
  std::vector<double> market_;
};

struct RestrictionThresholds {
  double max_abs_s = 0.1;
  double max_abs_m = 0.1;
  double sigma_s_sq = std::numeric_limits<double>::infinity();
  double sigma_m_sq = std::numeric_limits<double>::infinity();
};

// Watches the continuity and finite-variance conditions without enforcing
// them. Violations are flagged for reports.
class RestrictionMonitor {
 public:
  explicit RestrictionMonitor(double dt, RestrictionThresholds thresholds = {});

  void observe(double s, double m) noexcept;

  std::size_t rounds() const noexcept { return rounds_; }
  double max_abs_s() const noexcept { return max_abs_s_; }
  double max_abs_m() const noexcept { return max_abs_m_; }
  double sigma_s_sq() const noexcept;
  double sigma_m_sq() const noexcept;
  const RestrictionThresholds& thresholds() const noexcept { return thresholds_; }

  bool satisfied() const noexcept { return violations().empty(); }
  std::vector<std::string> violations() const;

 private:
  double dt_;
  RestrictionThresholds thresholds_;
  std::size_t rounds_ = 0;
  double max_abs_s_ = 0.0;
  double max_abs_m_ = 0.0;
  double sum_s2_ = 0.0;
  double sum_m2_ = 0.0;
};

// ln T <= dt^(-1/2): a sufficient condition for the largest diffusion
// increment to be negligible. Reported, never enforced.
bool increment_condition_holds(const GameConfig& config) noexcept;

struct RoundReturns {
  double investor = 0.0;  // s_n
  double index = 0.0;     // m_n
};

class GameState {
 public:
  explicit GameState(GameConfig config, std::size_t num_speculators = 1,
                     RestrictionThresholds thresholds = {});

  // Plays one round. On error the state is left untouched.
  // Throws ProtocolError after the last round, DomainError on width
  // mismatch, InvestorBankrupt when sum g(1+x) <= 0, WitnessFailure when
  // some speculator's sum h(1+x) < 0.
  RoundReturns play_round(const Weights& g, std::span<const Weights> h, const ReturnVector& x);
  RoundReturns play_round(const Weights& g, const Weights& h, const ReturnVector& x);

  const GameConfig& config() const noexcept { return config_; }
  std::size_t round() const noexcept { return round_; }
  bool finished() const noexcept { return round_ == config_.num_rounds(); }

  double investor_capital() const noexcept { return investor_capital_; }
  double index_capital() const noexcept { return index_capital_; }
  // Primary (first) speculator ledger.
  double speculator_capital() const noexcept { return speculator_capital_.front(); }
  std::span<const double> speculator_capitals() const noexcept { return speculator_capital_; }

  const History& history() const noexcept { return history_; }
  const RestrictionMonitor& restriction() const noexcept { return monitor_; }

 private:
  GameConfig config_;
  std::size_t round_ = 0;
  double investor_capital_ = 1.0;
  double index_capital_ = 1.0;
  std::vector<double> speculator_capital_;
  std::vector<double> gross_scratch_;
  History history_;
  RestrictionMonitor monitor_;
};

GameState new_game(const GameConfig& config, std::size_t num_speculators = 1);

// Players. Move order within a round is Investor, Speculator(s), Market;
// each later mover sees the earlier moves of the same round.
class Investor {
 public:
  virtual ~Investor() = default;
  virtual Weights move(const GameState& state) = 0;
};

class Speculator {
 public:
  virtual ~Speculator() = default;
  virtual Weights move(const GameState& state, const Weights& g) = 0;
  // Called once the round's returns are known.
  virtual void settle(const ReturnVector& /*x*/) {}
};

class Market {
 public:
  virtual ~Market() = default;
  virtual ReturnVector move(const GameState& state, const Weights& g,
                            std::span<const Weights> h) = 0;
};

struct GameResult {
  GameState state;
  MomentAccumulator moments;
};

GameResult run_game(const GameConfig& config, Investor& investor,
                    std::span<Speculator* const> speculators, Market& market,
                    RestrictionThresholds thresholds = {});

GameResult run_game(const GameConfig& config, Investor& investor, Speculator& speculator,
                    Market& market, RestrictionThresholds thresholds = {});

}  // namespace capm
