// capm_game: simulate, analyze and verify plays of the capital asset
// pricing game.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
// violation.

#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "capm/experiment.hpp"
#include "cli/commands.hpp"

namespace {

using namespace capm::cli;

void add_game_flags(CLI::App* cmd, GameOptions& g) {
  cmd->add_option("--K", g.num_securities, "Number of non-index securities")->capture_default_str();
  cmd->add_option("--N", g.num_rounds, "Number of rounds")->capture_default_str();
  cmd->add_option("--dt", g.dt, "Round duration (time units)")->capture_default_str();
  cmd->add_option("--seed", g.seed, "Random seed")->capture_default_str();
  cmd->add_option("--investor", g.investor,
                  "hold-index | fixed:w0,w1,... | buy-and-hold:w0,w1,...")
      ->capture_default_str();
}

void add_market_flags(CLI::App* cmd, MarketOptions& m) {
  cmd->add_option("--market", m.kind, "gbm | csv | alternating | contrarian")
      ->capture_default_str();
  cmd->add_option("--csv", m.csv, "Returns file for --market csv");
  cmd->add_option("--mu", m.mu, "GBM drift per security (comma list, 1 value broadcasts)")
      ->capture_default_str();
  cmd->add_option("--sigma", m.sigma, "GBM volatility per security")->capture_default_str();
  cmd->add_option("--corr", m.corr, "Off-diagonal correlation, or full row-major matrix")
      ->capture_default_str();
  cmd->add_option("--magnitude", m.magnitude, "Return size c for adversarial markets")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capital asset pricing game: simulation, analysis and witness verification"};
  app.require_subcommand(1);
  unsigned threads = 0;

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Play one game with the witness speculators");
  add_game_flags(simulate, sim.game);
  add_market_flags(simulate, sim.market);
  simulate->add_option("--epsilon", sim.epsilon, "Witness epsilon, in (0, 1/3)")
      ->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Prediction level")->capture_default_str();
  simulate->add_option("--out", sim.out, "Write the JSON report here");
  simulate->add_option("--dump-path", sim.dump_path, "Write the market path as CSV");

  AnalyzeOptions ana;
  auto* analyze = app.add_subcommand("analyze", "Analyze an observed returns CSV");
  analyze->add_option("--csv", ana.csv, "Returns file (column 1 after labels is the index)")
      ->required();
  analyze->add_option("--dt", ana.dt, "Round duration, e.g. 0.003968 for daily data in years")
      ->required();
  analyze->add_option("--investor", ana.investor,
                      "How s is formed; default: column after the index is the portfolio");
  analyze->add_option("--epsilon", ana.epsilon, "Witness epsilon")->capture_default_str();
  analyze->add_option("--alpha", ana.alpha, "Prediction level")->capture_default_str();
  analyze->add_option("--out", ana.out, "Write the JSON report here");

  VerifyOptions ver;
  auto* verify = app.add_subcommand(
      "verify",
      "Check the witness implications on many plays.\n"
      "Default grids: epsilon {0.01, 0.1, 0.3}, alpha {0.5, 0.1, 0.01}.");
  add_game_flags(verify, ver.game);
  add_market_flags(verify, ver.market);
  verify->add_option("--trials", ver.trials, "Number of plays")->capture_default_str();
  verify->add_option("--epsilons", ver.epsilons, "Epsilon grid (each in (0, 1/3))")
      ->capture_default_str();
  verify->add_option("--alphas", ver.alphas, "Alpha grid")->capture_default_str();
  verify->add_option("--corrupt-bound", ver.corrupt_bound,
                     "Test hook: multiply every bound by this factor");
  verify->add_option("--threads", threads, "Worker threads (0 = all cores)");
  verify->add_option("--out", ver.out, "Write the JSON report here");

  SweepOptions swp;
  auto* sweep = app.add_subcommand(
      "sweep", "Bound and residual versus dt at fixed T, matched driving noise (CSV)");
  add_market_flags(sweep, swp.market);
  sweep->add_option("--K", swp.num_securities, "Number of non-index securities")
      ->capture_default_str();
  sweep->add_option("--investor", swp.investor, "Investor policy")->capture_default_str();
  sweep->add_option("--dt-list", swp.dt_list, "Comma list of dt values")->capture_default_str();
  sweep->add_option("--T", swp.horizon, "Horizon")->capture_default_str();
  sweep->add_option("--seed", swp.seed, "First seed")->capture_default_str();
  sweep->add_option("--seeds", swp.seeds, "Number of consecutive seeds")->capture_default_str();
  sweep->add_option("--alpha", swp.alpha, "Prediction level")->capture_default_str();
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_option("--out", swp.out, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  // CAPM_GAME_THREADS caps whatever --threads asked for.
  if (const unsigned cap = capm::thread_cap_from_env(); cap > 0) {
    threads = threads == 0 ? cap : std::min(threads, cap);
  }

  return run_guarded(
      [&]() -> int {
        if (*simulate) return cmd_simulate(sim, std::cout);
        if (*analyze) return cmd_analyze(ana, std::cout);
        if (*verify) {
          ver.threads = threads;
          return cmd_verify(ver, std::cout);
        }
        swp.threads = threads;
        return cmd_sweep(swp, std::cout);
      },
      std::cerr);
}
