#include "capm/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "capm/errors.hpp"

namespace capm {

std::span<const double> History::investor_move(std::size_t round) const {
  if (round >= size()) throw ProtocolError("history index out of range");
  return std::span<const double>(investor_).subspan(round * width_, width_);
}

std::span<const double> History::market_move(std::size_t round) const {
  if (round >= size()) throw ProtocolError("history index out of range");
  return std::span<const double>(market_).subspan(round * width_, width_);
}

void History::reserve(std::size_t rounds) {
  investor_.reserve(rounds * width_);
  market_.reserve(rounds * width_);
}

void History::append(const Weights& g, const ReturnVector& x) {
  investor_.insert(investor_.end(), g.values().begin(), g.values().end());
  market_.insert(market_.end(), x.values().begin(), x.values().end());
}

RestrictionMonitor::RestrictionMonitor(double dt, RestrictionThresholds thresholds)
    : dt_(dt), thresholds_(thresholds) {}

void RestrictionMonitor::observe(double s, double m) noexcept {
  ++rounds_;
  max_abs_s_ = std::max(max_abs_s_, std::abs(s));
  max_abs_m_ = std::max(max_abs_m_, std::abs(m));
  sum_s2_ += s * s;
  sum_m2_ += m * m;
}

double RestrictionMonitor::sigma_s_sq() const noexcept {
  return rounds_ == 0 ? 0.0 : sum_s2_ / (static_cast<double>(rounds_) * dt_);
}

double RestrictionMonitor::sigma_m_sq() const noexcept {
  return rounds_ == 0 ? 0.0 : sum_m2_ / (static_cast<double>(rounds_) * dt_);
}

std::vector<std::string> RestrictionMonitor::violations() const {
  std::vector<std::string> out;
  if (max_abs_s_ > thresholds_.max_abs_s) out.emplace_back("max_abs_s");
  if (max_abs_m_ > thresholds_.max_abs_m) out.emplace_back("max_abs_m");
  if (sigma_s_sq() > thresholds_.sigma_s_sq) out.emplace_back("sigma_s_sq");
  if (sigma_m_sq() > thresholds_.sigma_m_sq) out.emplace_back("sigma_m_sq");
  return out;
}

bool increment_condition_holds(const GameConfig& config) noexcept {
  return std::log(config.horizon()) <= 1.0 / std::sqrt(config.dt());
}

GameState::GameState(GameConfig config, std::size_t num_speculators,
                     RestrictionThresholds thresholds)
    : config_(config),
      speculator_capital_(num_speculators, 1.0),
      gross_scratch_(num_speculators, 0.0),
      history_(config.width()),
      monitor_(config.dt(), thresholds) {
  if (num_speculators == 0) {
    throw ConfigError("a game needs at least one speculator ledger");
  }
  history_.reserve(config_.num_rounds());
}

GameState new_game(const GameConfig& config, std::size_t num_speculators) {
  return GameState(config, num_speculators);
}

RoundReturns GameState::play_round(const Weights& g, std::span<const Weights> h,
                                   const ReturnVector& x) {
  if (finished()) {
    throw ProtocolError("game already played all " + std::to_string(config_.num_rounds()) +
                        " rounds");
  }
  const std::size_t width = config_.width();
  if (g.size() != width || x.size() != width) {
    throw DomainError("move width does not match K + 1 = " + std::to_string(width));
  }
  if (h.size() != speculator_capital_.size()) {
    throw DomainError("expected " + std::to_string(speculator_capital_.size()) +
                      " speculator moves, got " + std::to_string(h.size()));
  }
  const std::size_t n = round_ + 1;

  const double investor_gross = g.gross_return(x);
  if (!(investor_gross > 0.0)) throw InvestorBankrupt(n, investor_gross);

  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j].size() != width) {
      throw DomainError("speculator move width does not match K + 1");
    }
    const double gross = h[j].gross_return(x);
    if (gross < 0.0) throw WitnessFailure(j, n, gross);
    gross_scratch_[j] = gross;
  }

  const RoundReturns r{g.simple_return(x), x.index()};
  investor_capital_ *= investor_gross;
  index_capital_ *= 1.0 + x.index();
  for (std::size_t j = 0; j < h.size(); ++j) speculator_capital_[j] *= gross_scratch_[j];
  history_.append(g, x);
  monitor_.observe(r.investor, r.index);
  round_ = n;
  return r;
}

RoundReturns GameState::play_round(const Weights& g, const Weights& h, const ReturnVector& x) {
  return play_round(g, std::span<const Weights>(&h, 1), x);
}

GameResult run_game(const GameConfig& config, Investor& investor,
                    std::span<Speculator* const> speculators, Market& market,
                    RestrictionThresholds thresholds) {
  GameResult result{GameState(config, speculators.size(), thresholds),
                    MomentAccumulator(config.dt())};
  std::vector<Weights> moves;
  moves.reserve(speculators.size());
  while (!result.state.finished()) {
    Weights g = investor.move(result.state);
    moves.clear();
    for (Speculator* sp : speculators) moves.push_back(sp->move(result.state, g));
    const ReturnVector x = market.move(result.state, g, moves);
    const RoundReturns r = result.state.play_round(g, moves, x);
    for (Speculator* sp : speculators) sp->settle(x);
    result.moments.update(r.investor, r.index);
  }
  return result;
}

GameResult run_game(const GameConfig& config, Investor& investor, Speculator& speculator,
                    Market& market, RestrictionThresholds thresholds) {
  Speculator* one[] = {&speculator};
  return run_game(config, investor, std::span<Speculator* const>(one), market, thresholds);
}

}  // namespace capm
