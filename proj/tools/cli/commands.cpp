#include "cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "capm/errors.hpp"

namespace capm::cli {
namespace {

using nlohmann::json;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<double> broadcast(const std::vector<double>& values, std::size_t width,
                              const char* what) {
  if (values.size() == 1) return std::vector<double>(width, values.front());
  if (values.size() != width) {
    throw UsageError(std::string(what) + " needs 1 or " + std::to_string(width) + " values");
  }
  return values;
}

void check_epsilon_alpha(double epsilon, double alpha) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) {
    throw UsageError("--epsilon must lie in (0, 1/3)");
  }
  if (!(alpha > 0.0)) throw UsageError("--alpha must be positive");
}

MarketModel build_market(const MarketOptions& m, std::size_t width, std::uint64_t seed) {
  if (m.kind == "gbm") {
    return MarketModel::gbm_model(parse_gbm(m.mu, m.sigma, m.corr, width), seed);
  }
  if (m.kind == "alternating") return MarketModel::adversarial(AdversarialRule::kAlternating, m.magnitude);
  if (m.kind == "contrarian") return MarketModel::adversarial(AdversarialRule::kContrarian, m.magnitude);
  throw UsageError("unknown --market '" + m.kind + "'");
}

json market_json(const MarketOptions& m) {
  json j{{"kind", m.kind}};
  if (m.kind == "gbm") {
    j["mu"] = m.mu;
    j["sigma"] = m.sigma;
    j["corr"] = m.corr;
  } else if (m.kind == "csv") {
    j["csv"] = m.csv;
  } else {
    j["magnitude"] = number(m.magnitude);
  }
  return j;
}

RunReport build_report(const std::string& command, json config, const WitnessGame& game,
                       double epsilon, double alpha, std::uint64_t seed) {
  const PlayRecord& rec = game.record;
  const GameConfig& cfg = game.state.config();
  const auto grid = default_epsilon_grid();
  RunReport r;
  r.command = command;
  r.config = std::move(config);
  r.summary = rec.summary;
  r.capm_residual = capm_residual(rec.summary);
  r.deficit_residual = deficit_residual(rec.summary);
  r.alpha = alpha;
  r.upper_bound = tightest_upper_bound(rec.summary, alpha, grid);
  r.lower_bound = tightest_lower_bound(rec.summary, alpha, grid);
  r.sandwich = prop2_sandwich(rec.summary);
  r.prediction = predict(rec, epsilon, alpha);
  r.witness_verdict_two_sided = verify_witness_two_sided(rec, epsilon, alpha).holds;
  r.restriction.max_abs_s = rec.summary.max_abs_s;
  r.restriction.max_abs_m = rec.summary.max_abs_m;
  r.restriction.clamp_count = rec.clamp_count;
  r.restriction.log_horizon = std::log(cfg.horizon());
  r.restriction.inv_sqrt_dt = 1.0 / std::sqrt(cfg.dt());
  r.restriction.increment_condition = increment_condition_holds(cfg);
  r.restriction.violations = rec.restriction_violations;
  r.investor_capital = rec.investor_capital;
  r.index_capital = rec.index_capital;
  for (const auto& l : rec.speculators) r.speculators.push_back({l.policy.label(), l.capital});
  r.seed = seed;
  return r;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError(path, 0, "cannot open file for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("'" + item + "' is not a number");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw UsageError("'" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

InvestorPolicy parse_investor(const std::string& spec, std::size_t width) {
  if (spec == "hold-index") return InvestorPolicy::hold_index();
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if (colon == std::string::npos || (kind != "fixed" && kind != "buy-and-hold")) {
    throw UsageError("investor must be hold-index, fixed:w0,w1,... or buy-and-hold:w0,w1,...");
  }
  auto w = parse_list(spec.substr(colon + 1));
  if (w.size() != width) {
    throw UsageError("investor weights need " + std::to_string(width) + " entries");
  }
  std::optional<Weights> weights;
  try {
    weights.emplace(std::move(w));
  } catch (const DomainError& e) {
    throw UsageError(std::string("investor weights: ") + e.what());
  }
  return kind == "fixed" ? InvestorPolicy::fixed(std::move(*weights))
                         : InvestorPolicy::buy_and_hold(std::move(*weights));
}

GbmParams parse_gbm(const std::string& mu, const std::string& sigma, const std::string& corr,
                    std::size_t width) {
  GbmParams p;
  p.mu = broadcast(parse_list(mu), width, "--mu");
  p.sigma = broadcast(parse_list(sigma), width, "--sigma");
  const auto c = parse_list(corr);
  p.correlation.assign(width, std::vector<double>(width, 0.0));
  if (c.size() == 1) {
    for (std::size_t i = 0; i < width; ++i)
      for (std::size_t j = 0; j < width; ++j) p.correlation[i][j] = i == j ? 1.0 : c.front();
  } else if (c.size() == width * width) {
    for (std::size_t i = 0; i < width; ++i)
      for (std::size_t j = 0; j < width; ++j) p.correlation[i][j] = c[i * width + j];
  } else {
    throw UsageError("--corr needs 1 or " + std::to_string(width * width) + " values");
  }
  return p;
}

SimulateResult simulate(const SimulateOptions& opts) {
  check_epsilon_alpha(opts.epsilon, opts.alpha);
  const auto start = std::chrono::steady_clock::now();
  WitnessGameSpec spec;
  std::vector<std::string> labels;
  if (opts.market.kind == "csv") {
    if (opts.market.csv.empty()) throw UsageError("--market csv needs --csv");
    const ReturnSeries series = with_security_column(load_csv(opts.market.csv, opts.game.dt));
    spec.config = game_config(series);
    spec.market = as_market(series);
    labels = series.labels;
  } else {
    spec.config = GameConfig(opts.game.num_securities, opts.game.num_rounds, opts.game.dt);
    spec.market = build_market(opts.market, spec.config.width(), opts.game.seed);
  }
  spec.investor = parse_investor(opts.game.investor, spec.config.width());
  spec.epsilons = {opts.epsilon};

  const WitnessGame game = play_witness_game(spec);
  json config{
      {"K", spec.config.num_securities()},
      {"N", spec.config.num_rounds()},
      {"dt", number(spec.config.dt())},
      {"T", number(spec.config.horizon())},
      {"investor", spec.investor.label()},
      {"market", market_json(opts.market)},
      {"epsilon", number(opts.epsilon)},
      {"alpha", number(opts.alpha)},
  };
  SimulateResult result{build_report("simulate", std::move(config), game, opts.epsilon,
                                     opts.alpha, opts.game.seed),
                        series_from_history(game.state.history(), spec.config.dt(), labels)};
  result.report.elapsed_ms = elapsed_ms(start);
  return result;
}

RunReport analyze(const AnalyzeOptions& opts) {
  check_epsilon_alpha(opts.epsilon, opts.alpha);
  if (opts.csv.empty()) throw UsageError("analyze needs --csv");
  if (!(opts.dt > 0.0)) throw UsageError("analyze needs a positive --dt");
  const auto start = std::chrono::steady_clock::now();
  const ReturnSeries series = with_security_column(load_csv(opts.csv, opts.dt));

  WitnessGameSpec spec;
  spec.config = game_config(series);
  spec.market = as_market(series);
  spec.investor = opts.investor.empty()
                      ? InvestorPolicy::fixed(Weights::unit(spec.config.width(), 1))
                      : parse_investor(opts.investor, spec.config.width());
  spec.epsilons = {opts.epsilon};

  const WitnessGame game = play_witness_game(spec);
  json config{
      {"K", spec.config.num_securities()},
      {"N", spec.config.num_rounds()},
      {"dt", number(spec.config.dt())},
      {"T", number(spec.config.horizon())},
      {"investor", spec.investor.label()},
      {"csv", opts.csv},
      {"labels", series.labels},
      {"epsilon", number(opts.epsilon)},
      {"alpha", number(opts.alpha)},
  };
  RunReport report = build_report("analyze", std::move(config), game, opts.epsilon, opts.alpha, 0);
  report.elapsed_ms = elapsed_ms(start);
  return report;
}

VerifyReport verify(const VerifyOptions& opts) {
  VerifySpec spec;
  if (opts.market.kind == "csv") {
    if (opts.market.csv.empty()) throw UsageError("--market csv needs --csv");
    const ReturnSeries series = with_security_column(load_csv(opts.market.csv, opts.game.dt));
    spec.config = game_config(series);
    spec.market = as_market(series);
  } else {
    spec.config = GameConfig(opts.game.num_securities, opts.game.num_rounds, opts.game.dt);
    spec.market = build_market(opts.market, spec.config.width(), opts.game.seed);
  }
  spec.investor = parse_investor(opts.game.investor, spec.config.width());
  spec.trials = opts.trials;
  spec.seed = opts.game.seed;
  spec.epsilons = parse_list(opts.epsilons);
  spec.alphas = parse_list(opts.alphas);
  for (double e : spec.epsilons) {
    if (!(e > 0.0 && e < 1.0 / 3.0)) throw UsageError("--epsilons must lie in (0, 1/3)");
  }
  for (double a : spec.alphas) {
    if (!(a > 0.0)) throw UsageError("--alphas must be positive");
  }
  spec.bound_scale = opts.corrupt_bound;
  spec.threads = opts.threads;
  return run_verification(spec);
}

std::vector<ConvergenceRow> sweep(const SweepOptions& opts) {
  if (opts.market.kind != "gbm") throw UsageError("sweep supports --market gbm only");
  if (opts.seeds == 0) throw UsageError("--seeds must be at least 1");
  ConvergenceSpec spec;
  const std::size_t width = opts.num_securities + 1;
  spec.params = parse_gbm(opts.market.mu, opts.market.sigma, opts.market.corr, width);
  spec.investor = parse_investor(opts.investor, width);
  spec.horizon = opts.horizon;
  spec.dts = parse_list(opts.dt_list);
  spec.seeds.clear();
  for (std::size_t i = 0; i < opts.seeds; ++i) spec.seeds.push_back(opts.seed + i);
  spec.alpha = opts.alpha;
  spec.threads = opts.threads;
  return convergence_sweep(spec);
}

void write_sweep_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
  out << "seed,dt,rounds,capm_residual,abs_capm_residual,upper_bound,upper_epsilon,"
         "lower_bound,lower_epsilon,max_abs_m,max_abs_s\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), ",%.17g", v);
    out << buf;
  };
  for (const auto& r : rows) {
    out << r.seed;
    put(r.dt);
    out << ',' << r.rounds;
    put(r.capm_residual);
    put(std::abs(r.capm_residual));
    put(r.upper_bound);
    put(r.upper_epsilon);
    put(r.lower_bound);
    put(r.lower_epsilon);
    put(r.max_abs_m);
    put(r.max_abs_s);
    out << '\n';
  }
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out) {
  const SimulateResult result = simulate(opts);
  if (!opts.dump_path.empty()) save_csv(result.path, opts.dump_path);
  if (!opts.out.empty()) write_json(to_json(result.report), opts.out);
  out << format_table(result.report);
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out) {
  const RunReport report = analyze(opts);
  if (!opts.out.empty()) write_json(to_json(report), opts.out);
  out << format_table(report);
  return kExitOk;
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out) {
  const VerifyReport report = verify(opts);
  if (!opts.out.empty()) write_json(to_json(report), opts.out);
  out << format_table(report);
  return report.passed() ? kExitOk : kExitViolation;
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out) {
  const auto rows = sweep(opts);
  if (opts.out.empty()) {
    write_sweep_csv(rows, out);
  } else {
    std::ofstream file(opts.out, std::ios::binary);
    if (!file) throw IngestError(opts.out, 0, "cannot open file for writing");
    write_sweep_csv(rows, file);
  }
  return kExitOk;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace capm::cli
