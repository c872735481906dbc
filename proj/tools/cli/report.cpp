#include "cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace capm::cli {

using nlohmann::json;

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

namespace {

json summary_json(const MomentSummary& s) {
  return {
      {"rounds", s.rounds},
      {"horizon", number(s.horizon)},
      {"mu_s", number(s.mu_s)},
      {"mu_m", number(s.mu_m)},
      {"sigma_s_sq", number(s.sigma_s_sq)},
      {"sigma_m_sq", number(s.sigma_m_sq)},
      {"sigma_sm", number(s.sigma_sm)},
      {"sigma_diff_sq", number(s.sigma_diff_sq)},
      {"sigma_2ms_sq", number(s.sigma_2ms_sq)},
      {"lambda_s", number(s.lambda_s)},
      {"lambda_m", number(s.lambda_m)},
      {"gamma_abs_s", number(s.gamma_abs_s)},
      {"gamma_abs_m", number(s.gamma_abs_m)},
      {"big_gamma_s", number(s.big_gamma_s)},
      {"big_gamma_m", number(s.big_gamma_m)},
      {"max_abs_s", number(s.max_abs_s)},
      {"max_abs_m", number(s.max_abs_m)},
      {"max_s_ratio", number(s.max_s_ratio)},
      {"max_m_ratio", number(s.max_m_ratio)},
      {"max_2ms_ratio", number(s.max_2ms_ratio)},
  };
}

MomentSummary summary_from(const json& j) {
  MomentSummary s;
  s.rounds = j.at("rounds").get<std::size_t>();
  s.horizon = number_from(j.at("horizon"));
  s.mu_s = number_from(j.at("mu_s"));
  s.mu_m = number_from(j.at("mu_m"));
  s.sigma_s_sq = number_from(j.at("sigma_s_sq"));
  s.sigma_m_sq = number_from(j.at("sigma_m_sq"));
  s.sigma_sm = number_from(j.at("sigma_sm"));
  s.sigma_diff_sq = number_from(j.at("sigma_diff_sq"));
  s.sigma_2ms_sq = number_from(j.at("sigma_2ms_sq"));
  s.lambda_s = number_from(j.at("lambda_s"));
  s.lambda_m = number_from(j.at("lambda_m"));
  s.gamma_abs_s = number_from(j.at("gamma_abs_s"));
  s.gamma_abs_m = number_from(j.at("gamma_abs_m"));
  s.big_gamma_s = number_from(j.at("big_gamma_s"));
  s.big_gamma_m = number_from(j.at("big_gamma_m"));
  s.max_abs_s = number_from(j.at("max_abs_s"));
  s.max_abs_m = number_from(j.at("max_abs_m"));
  s.max_s_ratio = number_from(j.at("max_s_ratio"));
  s.max_m_ratio = number_from(j.at("max_m_ratio"));
  s.max_2ms_ratio = number_from(j.at("max_2ms_ratio"));
  return s;
}

json prediction_json(const PredictionReport& p) {
  return {
      {"epsilon", number(p.epsilon)},
      {"alpha", number(p.alpha)},
      {"capm_residual", number(p.capm_residual)},
      {"deficit_residual", number(p.deficit_residual)},
      {"upper_bound_p1", number(p.upper_bound_p1)},
      {"lower_bound_p1", number(p.lower_bound_p1)},
      {"p2_upper_slack", number(p.p2_upper_slack)},
      {"p2_lower_slack", number(p.p2_lower_slack)},
      {"speculator_terminal_ratio_blend", number(p.speculator_terminal_ratio_blend)},
      {"speculator_terminal_ratio_short", number(p.speculator_terminal_ratio_short)},
      {"witness_verdict_upper", p.witness_verdict_upper},
      {"witness_verdict_lower", p.witness_verdict_lower},
  };
}

PredictionReport prediction_from(const json& j) {
  PredictionReport p;
  p.epsilon = number_from(j.at("epsilon"));
  p.alpha = number_from(j.at("alpha"));
  p.capm_residual = number_from(j.at("capm_residual"));
  p.deficit_residual = number_from(j.at("deficit_residual"));
  p.upper_bound_p1 = number_from(j.at("upper_bound_p1"));
  p.lower_bound_p1 = number_from(j.at("lower_bound_p1"));
  p.p2_upper_slack = number_from(j.at("p2_upper_slack"));
  p.p2_lower_slack = number_from(j.at("p2_lower_slack"));
  p.speculator_terminal_ratio_blend = number_from(j.at("speculator_terminal_ratio_blend"));
  p.speculator_terminal_ratio_short = number_from(j.at("speculator_terminal_ratio_short"));
  p.witness_verdict_upper = j.at("witness_verdict_upper").get<bool>();
  p.witness_verdict_lower = j.at("witness_verdict_lower").get<bool>();
  return p;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void row(std::ostringstream& os, const std::string& key, const std::string& value) {
  os << "  ";
  os.width(34);
  os << std::left << key;
  if (key.size() >= 34) os << "  ";
  os << value << '\n';
}

}  // namespace

json to_json(const RunReport& r) {
  json speculators = json::array();
  for (const auto& l : r.speculators) {
    speculators.push_back({{"policy", l.policy}, {"capital", number(l.capital)}});
  }
  return {
      {"command", r.command},
      {"config", r.config},
      {"seed", r.seed},
      {"moments", summary_json(r.summary)},
      {"capm_residual", number(r.capm_residual)},
      {"deficit_residual", number(r.deficit_residual)},
      {"alpha", number(r.alpha)},
      {"prop1_bounds",
       {{"upper", number(r.upper_bound.bound)},
        {"upper_epsilon", number(r.upper_bound.epsilon)},
        {"lower", number(r.lower_bound.bound)},
        {"lower_epsilon", number(r.lower_bound.epsilon)}}},
      {"prop2_sandwich",
       {{"lower_gap", number(r.sandwich.lower_gap)},
        {"upper_gap", number(r.sandwich.upper_gap)},
        {"lower_slack", number(r.sandwich.lower_slack)},
        {"upper_slack", number(r.sandwich.upper_slack)}}},
      {"prediction", prediction_json(r.prediction)},
      {"witness_verdict_two_sided", r.witness_verdict_two_sided},
      {"restriction",
       {{"max_abs_s", number(r.restriction.max_abs_s)},
        {"max_abs_m", number(r.restriction.max_abs_m)},
        {"clamp_count", r.restriction.clamp_count},
        {"log_horizon", number(r.restriction.log_horizon)},
        {"inv_sqrt_dt", number(r.restriction.inv_sqrt_dt)},
        {"increment_condition", r.restriction.increment_condition},
        {"violations", r.restriction.violations}}},
      {"capital",
       {{"investor", number(r.investor_capital)},
        {"index", number(r.index_capital)},
        {"speculators", speculators}}},
      {"timing", {{"elapsed_ms", number(r.elapsed_ms)}}},
  };
}

RunReport run_report_from_json(const json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.summary = summary_from(j.at("moments"));
  r.capm_residual = number_from(j.at("capm_residual"));
  r.deficit_residual = number_from(j.at("deficit_residual"));
  r.alpha = number_from(j.at("alpha"));
  const auto& b = j.at("prop1_bounds");
  r.upper_bound = {number_from(b.at("upper_epsilon")), number_from(b.at("upper"))};
  r.lower_bound = {number_from(b.at("lower_epsilon")), number_from(b.at("lower"))};
  const auto& s = j.at("prop2_sandwich");
  r.sandwich.lower_gap = number_from(s.at("lower_gap"));
  r.sandwich.upper_gap = number_from(s.at("upper_gap"));
  r.sandwich.lower_slack = number_from(s.at("lower_slack"));
  r.sandwich.upper_slack = number_from(s.at("upper_slack"));
  r.prediction = prediction_from(j.at("prediction"));
  r.witness_verdict_two_sided = j.at("witness_verdict_two_sided").get<bool>();
  const auto& d = j.at("restriction");
  r.restriction.max_abs_s = number_from(d.at("max_abs_s"));
  r.restriction.max_abs_m = number_from(d.at("max_abs_m"));
  r.restriction.clamp_count = d.at("clamp_count").get<std::size_t>();
  r.restriction.log_horizon = number_from(d.at("log_horizon"));
  r.restriction.inv_sqrt_dt = number_from(d.at("inv_sqrt_dt"));
  r.restriction.increment_condition = d.at("increment_condition").get<bool>();
  r.restriction.violations = d.at("violations").get<std::vector<std::string>>();
  const auto& c = j.at("capital");
  r.investor_capital = number_from(c.at("investor"));
  r.index_capital = number_from(c.at("index"));
  for (const auto& l : c.at("speculators")) {
    r.speculators.push_back({l.at("policy").get<std::string>(), number_from(l.at("capital"))});
  }
  r.elapsed_ms = number_from(j.at("timing").at("elapsed_ms"));
  return r;
}

json to_json(const VerifyReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({
        {"epsilon", number(c.epsilon)},
        {"alpha", number(c.alpha)},
        {"checked", c.checked},
        {"upper_holds", c.upper_holds},
        {"lower_holds", c.lower_holds},
        {"two_sided_holds", c.two_sided_holds},
        {"upper_by_capital", c.upper_by_capital},
        {"lower_by_capital", c.lower_by_capital},
        {"min_upper_margin", number(c.min_upper_margin)},
        {"min_lower_margin", number(c.min_lower_margin)},
    });
  }
  return {
      {"trials", r.trials},
      {"completed", r.completed},
      {"guard_trips", r.guard_trips},
      {"rejected_paths", r.rejected_paths},
      {"sandwich_violations", r.sandwich_violations},
      {"verdict_violations", r.verdict_violations},
      {"clamps", r.clamps},
      {"restriction_flags", r.restriction_flags},
      {"min_lower_gap", number(r.min_lower_gap)},
      {"min_upper_gap", number(r.min_upper_gap)},
      {"passed", r.passed()},
      {"cells", cells},
      {"failures", r.failures},
  };
}

std::string format_table(const RunReport& r) {
  std::ostringstream os;
  const MomentSummary& s = r.summary;
  os << r.command << ": " << s.rounds << " rounds, T = " << fmt(s.horizon) << '\n';
  row(os, "mu_s / mu_m", fmt(s.mu_s) + " / " + fmt(s.mu_m));
  row(os, "sigma_s^2 / sigma_m^2", fmt(s.sigma_s_sq) + " / " + fmt(s.sigma_m_sq));
  row(os, "sigma_sm", fmt(s.sigma_sm));
  row(os, "sigma_{s-m}^2", fmt(s.sigma_diff_sq));
  row(os, "lambda_s / lambda_m", fmt(s.lambda_s) + " / " + fmt(s.lambda_m));
  row(os, "capm residual", fmt(r.capm_residual));
  row(os, "lambda_s - lambda_m", fmt(s.lambda_s - s.lambda_m));
  row(os, "-sigma_{s-m}^2 / 2", fmt(-0.5 * s.sigma_diff_sq));
  row(os, "deficit residual", fmt(r.deficit_residual));
  row(os, "upper bound (eps*)",
      fmt(r.upper_bound.bound) + "  (eps " + fmt(r.upper_bound.epsilon) + ")");
  row(os, "lower bound (eps*)",
      fmt(r.lower_bound.bound) + "  (eps " + fmt(r.lower_bound.epsilon) + ")");
  row(os, "sandwich gaps (lower, upper)",
      fmt(r.sandwich.lower_gap) + ", " + fmt(r.sandwich.upper_gap));
  row(os, "verdicts at eps " + fmt(r.prediction.epsilon),
      std::string(r.prediction.witness_verdict_upper ? "upper ok" : "UPPER FAILED") + ", " +
          (r.prediction.witness_verdict_lower ? "lower ok" : "LOWER FAILED") + ", " +
          (r.witness_verdict_two_sided ? "two-sided ok" : "TWO-SIDED FAILED"));
  row(os, "max|s_n| / max|m_n|",
      fmt(r.restriction.max_abs_s) + " / " + fmt(r.restriction.max_abs_m));
  row(os, "ln T <= dt^-1/2", r.restriction.increment_condition ? "yes" : "no");
  row(os, "clamped returns", std::to_string(r.restriction.clamp_count));
  row(os, "investor / index capital", fmt(r.investor_capital) + " / " + fmt(r.index_capital));
  for (const auto& l : r.speculators) row(os, l.policy, fmt(l.capital));
  return os.str();
}

std::string format_table(const VerifyReport& r) {
  std::ostringstream os;
  os << "verify: " << r.completed << "/" << r.trials << " trials completed\n";
  row(os, "guard trips", std::to_string(r.guard_trips));
  row(os, "rejected paths", std::to_string(r.rejected_paths));
  row(os, "sandwich violations", std::to_string(r.sandwich_violations));
  row(os, "verdict violations", std::to_string(r.verdict_violations));
  row(os, "min sandwich gaps", fmt(r.min_lower_gap) + ", " + fmt(r.min_upper_gap));
  for (const auto& c : r.cells) {
    row(os, "eps " + fmt(c.epsilon) + " alpha " + fmt(c.alpha),
        std::to_string(c.upper_holds) + "/" + std::to_string(c.checked) + " upper, " +
            std::to_string(c.lower_holds) + "/" + std::to_string(c.checked) + " lower, " +
            std::to_string(c.two_sided_holds) + "/" + std::to_string(c.checked) + " split");
  }
  for (const auto& f : r.failures) os << "  ! " << f << '\n';
  os << (r.passed() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace capm::cli
