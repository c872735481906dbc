#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "capm/experiment.hpp"
#include "capm/ingest.hpp"
#include "capm/strategies.hpp"
#include "cli/report.hpp"

namespace capm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitViolation = 3,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "0.1,0.2,0.3" -> {0.1, 0.2, 0.3}
std::vector<double> parse_list(const std::string& text);

// hold-index | fixed:w0,w1,... | buy-and-hold:w0,w1,...
InvestorPolicy parse_investor(const std::string& spec, std::size_t width);

// Lists of length 1 are broadcast to every security. corr is either a
// single off-diagonal correlation or a full row-major matrix.
GbmParams parse_gbm(const std::string& mu, const std::string& sigma, const std::string& corr,
                    std::size_t width);

struct GameOptions {
  std::size_t num_securities = 1;
  std::size_t num_rounds = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  std::string investor = "fixed:0.5,0.5";
};

struct MarketOptions {
  std::string kind = "gbm";  // gbm | csv | alternating | contrarian
  std::string csv;
  std::string mu = "0.05,0.08";
  std::string sigma = "0.2,0.3";
  std::string corr = "0.5";
  double magnitude = 0.01;
};

struct SimulateOptions {
  GameOptions game;
  MarketOptions market;
  double epsilon = 0.1;
  double alpha = 0.01;
  std::string out;
  std::string dump_path;
};

struct AnalyzeOptions {
  std::string csv;
  double dt = 0.0;
  std::string investor;  // empty: column 1 is the portfolio
  double epsilon = 0.1;
  double alpha = 0.01;
  std::string out;
};

struct VerifyOptions {
  GameOptions game;
  MarketOptions market;
  std::size_t trials = 1000;
  std::string epsilons = "0.01,0.1,0.3";
  std::string alphas = "0.5,0.1,0.01";
  double corrupt_bound = 1.0;
  unsigned threads = 0;
  std::string out;
};

struct SweepOptions {
  MarketOptions market;
  std::string investor = "fixed:0.5,0.5";
  std::size_t num_securities = 1;
  std::string dt_list = "1e-2,1e-3,1e-4";
  double horizon = 50.0;
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  double alpha = 0.01;
  unsigned threads = 0;
  std::string out;
};

struct SimulateResult {
  RunReport report;
  ReturnSeries path;
};

SimulateResult simulate(const SimulateOptions& opts);
RunReport analyze(const AnalyzeOptions& opts);
VerifyReport verify(const VerifyOptions& opts);
std::vector<ConvergenceRow> sweep(const SweepOptions& opts);

void write_sweep_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out);

// Full commands: compute, write files, print tables, return the exit code.
int cmd_simulate(const SimulateOptions& opts, std::ostream& out);
int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out);
int cmd_verify(const VerifyOptions& opts, std::ostream& out);
int cmd_sweep(const SweepOptions& opts, std::ostream& out);

// Maps exceptions to exit codes: usage/config problems 1, data and engine
// errors 2.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace capm::cli
