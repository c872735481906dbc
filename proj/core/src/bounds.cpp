#include "capm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capm/errors.hpp"

namespace capm {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("alpha must be positive and finite");
  }
}

// c * ratio with the convention 0 * inf = 0 (an empty or all-zero path).
double weighted(double c, double ratio) { return c == 0.0 ? 0.0 : c * ratio; }

bool at_least_capital(double ratio, double alpha) {
  return ratio >= (1.0 / alpha) * (1.0 - kImplicationSlack);
}

double tolerance(double a, double b) {
  return kImplicationSlack * std::max(std::abs(a), std::abs(b));
}

}  // namespace

double remainder_lower(double x) {
  if (!(x > -1.0)) throw DomainError("remainder_lower needs x > -1");
  const double r = x / (1.0 + x);
  return r * r * r / 3.0;
}

double remainder_upper(double x) noexcept { return x * x * x / 3.0; }

double prop1_upper_bound(const MomentSummary& sum, double epsilon, double alpha) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  check_alpha(alpha);
  const double k = 1.0 / (3.0 * epsilon);
  return 0.5 * epsilon * sum.sigma_diff_sq + k * weighted(sum.sigma_s_sq, sum.max_s_ratio) +
         k * weighted(sum.sigma_m_sq, sum.max_m_ratio) + k * sum.sigma_m_sq * sum.max_abs_m +
         std::log(1.0 / alpha) / (sum.horizon * epsilon);
}

double prop1_lower_bound(const MomentSummary& sum, double epsilon, double alpha) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) throw ConfigError("epsilon must lie in (0, 1/3)");
  check_alpha(alpha);
  const double k = 1.0 / (3.0 * epsilon);
  return -0.5 * epsilon * sum.sigma_diff_sq - k * weighted(sum.sigma_m_sq, sum.max_m_ratio) -
         k * weighted(sum.sigma_2ms_sq, sum.max_2ms_ratio) - k * sum.sigma_m_sq * sum.max_abs_m -
         std::log(1.0 / alpha) / (sum.horizon * epsilon);
}

std::vector<double> default_epsilon_grid() {
  constexpr std::size_t kPoints = 25;
  const double lo = std::log(1e-3);
  const double hi = std::log(0.33);
  std::vector<double> grid(kPoints);
  for (std::size_t i = 0; i < kPoints; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1));
  }
  grid.back() = 0.33;
  return grid;
}

BoundChoice tightest_upper_bound(const MomentSummary& sum, double alpha,
                                 std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("epsilon grid is empty");
  BoundChoice best{grid.front(), std::numeric_limits<double>::infinity()};
  for (double eps : grid) {
    const double b = prop1_upper_bound(sum, eps, alpha);
    if (b < best.bound) best = {eps, b};
  }
  return best;
}

BoundChoice tightest_lower_bound(const MomentSummary& sum, double alpha,
                                 std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("epsilon grid is empty");
  BoundChoice best{grid.front(), -std::numeric_limits<double>::infinity()};
  for (double eps : grid) {
    const double b = prop1_lower_bound(sum, eps, alpha);
    if (b > best.bound) best = {eps, b};
  }
  return best;
}

SandwichGaps prop2_sandwich(const MomentSummary& sum) noexcept {
  const double r = capm_residual(sum);
  const double d = deficit_residual(sum);
  SandwichGaps gaps;
  gaps.upper_slack = sum.big_gamma_s + sum.gamma_abs_m;
  gaps.lower_slack = sum.gamma_abs_s + sum.big_gamma_m;
  gaps.lower_gap = d - (r - gaps.lower_slack);
  gaps.upper_gap = (r + gaps.upper_slack) - d;
  return gaps;
}

const SpeculatorLedger& PlayRecord::ledger(const SpeculatorPolicy& policy) const {
  for (const auto& l : speculators) {
    if (l.policy == policy) return l;
  }
  throw ConfigError("no ledger recorded for speculator " + policy.label());
}

WitnessVerdict verify_witness_upper(const PlayRecord& play, double epsilon, double alpha,
                                    double bound_scale) {
  const SpeculatorLedger& l = play.ledger(SpeculatorPolicy::blend(epsilon));
  WitnessVerdict v;
  v.residual = capm_residual(play.summary);
  v.bound = bound_scale * prop1_upper_bound(play.summary, epsilon, alpha);
  v.capital_ratio = l.capital / play.index_capital;
  v.capital_clause = at_least_capital(v.capital_ratio, alpha);
  v.margin = v.bound - v.residual;
  v.event_clause = v.margin + tolerance(v.bound, v.residual) > 0.0;
  v.holds = v.capital_clause || v.event_clause;
  return v;
}

WitnessVerdict verify_witness_lower(const PlayRecord& play, double epsilon, double alpha,
                                    double bound_scale) {
  const SpeculatorLedger& l = play.ledger(SpeculatorPolicy::short_blend(epsilon));
  WitnessVerdict v;
  v.residual = capm_residual(play.summary);
  v.bound = bound_scale * prop1_lower_bound(play.summary, epsilon, alpha);
  v.capital_ratio = l.capital / play.index_capital;
  v.capital_clause = at_least_capital(v.capital_ratio, alpha);
  v.margin = v.residual - v.bound;
  v.event_clause = v.margin + tolerance(v.bound, v.residual) > 0.0;
  v.holds = v.capital_clause || v.event_clause;
  return v;
}

SpeculatorPolicy equal_split(double epsilon) {
  return SpeculatorPolicy::split({{0.5, SpeculatorPolicy::blend(epsilon)},
                                  {0.5, SpeculatorPolicy::short_blend(epsilon)}});
}

WitnessVerdict verify_witness_two_sided(const PlayRecord& play, double epsilon, double alpha,
                                        double bound_scale) {
  const SpeculatorLedger& l = play.ledger(equal_split(epsilon));
  const double half = 0.5 * alpha;
  WitnessVerdict v;
  v.residual = capm_residual(play.summary);
  const double upper = bound_scale * prop1_upper_bound(play.summary, epsilon, half);
  const double lower = bound_scale * prop1_lower_bound(play.summary, epsilon, half);
  v.bound = upper;
  v.capital_ratio = l.capital / play.index_capital;
  v.capital_clause = at_least_capital(v.capital_ratio, alpha);
  v.margin = std::min(upper - v.residual, v.residual - lower);
  v.event_clause = (upper - v.residual) + tolerance(upper, v.residual) > 0.0 &&
                   (v.residual - lower) + tolerance(lower, v.residual) > 0.0;
  v.holds = v.capital_clause || v.event_clause;
  return v;
}

PredictionReport predict(const PlayRecord& play, double epsilon, double alpha) {
  const WitnessVerdict up = verify_witness_upper(play, epsilon, alpha);
  const WitnessVerdict lo = verify_witness_lower(play, epsilon, alpha);
  const SandwichGaps gaps = prop2_sandwich(play.summary);
  PredictionReport r;
  r.epsilon = epsilon;
  r.alpha = alpha;
  r.capm_residual = capm_residual(play.summary);
  r.deficit_residual = deficit_residual(play.summary);
  r.upper_bound_p1 = up.bound;
  r.lower_bound_p1 = lo.bound;
  r.p2_upper_slack = gaps.upper_slack;
  r.p2_lower_slack = gaps.lower_slack;
  r.speculator_terminal_ratio_blend = up.capital_ratio;
  r.speculator_terminal_ratio_short = lo.capital_ratio;
  r.witness_verdict_upper = up.holds;
  r.witness_verdict_lower = lo.holds;
  return r;
}

}  // namespace capm
