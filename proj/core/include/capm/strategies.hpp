#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "capm/protocol.hpp"
#include "capm/types.hpp"

namespace capm {

// ---------------------------------------------------------------------------
// Investor

struct InvestorPolicy {
  enum class Kind { kHoldIndex, kFixedWeights, kBuyAndHold, kCustomSchedule };

  Kind kind = Kind::kHoldIndex;
  std::vector<Weights> weights;  // one entry for fixed / buy-and-hold, N for a schedule

  static InvestorPolicy hold_index();
  static InvestorPolicy fixed(Weights w);
  // Constant share counts: fractions drift with relative prices.
  static InvestorPolicy buy_and_hold(Weights initial);
  // Round n plays schedule[n-1]; running past the end is a ProtocolError.
  static InvestorPolicy schedule(std::vector<Weights> moves);

  std::string label() const;
};

std::unique_ptr<Investor> make_investor(const InvestorPolicy& policy);

// ---------------------------------------------------------------------------
// Speculator

struct SplitChild;

struct SpeculatorPolicy {
  enum class Kind { kHoldIndex, kBlend, kShortBlend, kSplit };

  Kind kind = Kind::kHoldIndex;
  double epsilon = 0.0;
  std::vector<SplitChild> children;

  static SpeculatorPolicy hold_index();
  // ε of capital in Investor's portfolio, 1-ε in the index; 0 < ε < 1.
  static SpeculatorPolicy blend(double epsilon);
  // -ε in Investor's portfolio, 1+ε in the index; 0 < ε < 1/3.
  static SpeculatorPolicy short_blend(double epsilon);
  // Independent accounts seeded with fixed capital fractions.
  static SpeculatorPolicy split(std::vector<SplitChild> children);

  std::string label() const;
  friend bool operator==(const SpeculatorPolicy&, const SpeculatorPolicy&);
};

struct SplitChild {
  double weight = 0.0;
  SpeculatorPolicy policy;
  friend bool operator==(const SplitChild&, const SplitChild&) = default;
};

// h = ε g + (1-ε) e_0
Weights blend_move(double epsilon, const Weights& g);
// h = -ε g + (1+ε) e_0
Weights short_blend_move(double epsilon, const Weights& g);

std::unique_ptr<Speculator> make_speculator(const SpeculatorPolicy& policy);

// Split speculator: each child trades its own sub-account; the combined
// move is the capital-weighted mixture of child moves, so the combined
// ledger equals sum_j w_j H^(j) at every round.
class SplitSpeculator final : public Speculator {
 public:
  explicit SplitSpeculator(const std::vector<SplitChild>& children);

  Weights move(const GameState& state, const Weights& g) override;
  void settle(const ReturnVector& x) override;

  // Capital of child j as a fraction of the initial total.
  std::span<const double> child_capitals() const noexcept { return capital_; }

 private:
  std::vector<std::unique_ptr<Speculator>> children_;
  std::vector<double> capital_;
  std::vector<Weights> last_moves_;
};

// ---------------------------------------------------------------------------
// Market

struct GbmParams {
  std::vector<double> mu;                        // drift per unit time, per security
  std::vector<double> sigma;                     // volatility per sqrt unit time
  std::vector<std::vector<double>> correlation;  // (K+1)x(K+1), unit diagonal, PSD

  // Independent securities sharing mu and sigma.
  static GbmParams uniform(std::size_t width, double mu, double sigma);
  std::size_t width() const noexcept { return mu.size(); }
};

enum class AdversarialRule {
  // Index alternates +c/-c; odd-numbered securities move opposite to it,
  // even-numbered ones with it.
  kAlternating,
  // Index alternates +c/-c; each other security moves -c where the first
  // speculator holds it long, +c otherwise. Uses the same-round move.
  kContrarian,
};

struct MarketModel {
  enum class Kind { kGbm, kDeterministic, kAdversarial };

  Kind kind = Kind::kGbm;
  GbmParams gbm;
  std::vector<ReturnVector> path;
  AdversarialRule rule = AdversarialRule::kAlternating;
  double magnitude = 0.01;
  std::uint64_t seed = 0;

  static MarketModel gbm_model(GbmParams params, std::uint64_t seed);
  static MarketModel deterministic(std::vector<ReturnVector> path);
  static MarketModel adversarial(AdversarialRule rule, double magnitude);
};

// Lower bound applied to generated returns: -1 + 1e-9.
inline constexpr double kReturnFloor = -1.0 + 1e-9;

// Euler-discretized simple returns x^k = mu^k dt + sigma^k sqrt(dt) Z^k with
// correlated standard normals Z. Deterministic for a given seed.
class GbmGenerator {
 public:
  GbmGenerator(const GbmParams& params, double dt, std::uint64_t seed);

  ReturnVector next();
  // Builds returns from caller-supplied independent standard normals.
  ReturnVector from_normals(std::span<const double> iid);

  std::size_t clamp_count() const noexcept { return clamps_; }
  std::size_t width() const noexcept { return mu_dt_.size(); }

 private:
  std::vector<double> mu_dt_;
  std::vector<double> sigma_sqrt_dt_;
  std::vector<double> factor_;  // row-major, F F^T = correlation
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::vector<double> iid_;
  std::size_t clamps_ = 0;
};

// F with F F^T = C. Throws ConfigError unless C is symmetric, has unit
// diagonal and is positive semidefinite.
std::vector<double> correlation_factor(const std::vector<std::vector<double>>& correlation);

class GbmMarket final : public Market {
 public:
  GbmMarket(const GbmParams& params, double dt, std::uint64_t seed)
      : generator_(params, dt, seed) {}
  ReturnVector move(const GameState&, const Weights&, std::span<const Weights>) override {
    return generator_.next();
  }
  std::size_t clamp_count() const noexcept { return generator_.clamp_count(); }

 private:
  GbmGenerator generator_;
};

class ReplayMarket final : public Market {
 public:
  explicit ReplayMarket(std::vector<ReturnVector> path) : path_(std::move(path)) {}
  ReturnVector move(const GameState& state, const Weights&, std::span<const Weights>) override;
  bool exhausted() const noexcept { return next_ >= path_.size(); }

 private:
  std::vector<ReturnVector> path_;
  std::size_t next_ = 0;
};

class AdversarialMarket final : public Market {
 public:
  AdversarialMarket(AdversarialRule rule, double magnitude);
  ReturnVector move(const GameState& state, const Weights& g,
                    std::span<const Weights> h) override;

 private:
  AdversarialRule rule_;
  double magnitude_;
};

std::unique_ptr<Market> make_market(const MarketModel& model, const GameConfig& config);

// Number of clamped returns so far, or 0 for markets that never clamp.
std::size_t clamp_count(const Market& market) noexcept;

// GBM paths over one horizon at several step sizes, all driven by the same
// Brownian path: normals are drawn at the finest step and summed in blocks.
// Every dt must be an integer multiple of the smallest and divide horizon.
std::vector<std::vector<ReturnVector>> matched_gbm_paths(const GbmParams& params, double horizon,
                                                         const std::vector<double>& dts,
                                                         std::uint64_t seed);

}  // namespace capm
