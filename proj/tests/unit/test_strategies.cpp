#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "capm/errors.hpp"
#include "capm/moments.hpp"
#include "capm/protocol.hpp"
#include "capm/strategies.hpp"
#include "support/oracle.hpp"

namespace capm {
namespace {

using testing::close_rel;
using testing::random_weights;

ReturnVector random_returns(std::mt19937_64& rng, std::size_t width, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> x(width);
  for (double& v : x) v = u(rng);
  return ReturnVector(x);
}

TEST(BlendMove, Examples) {
  EXPECT_EQ(blend_move(0.5, Weights{0, 1}), (Weights{0.5, 0.5}));
  EXPECT_EQ(blend_move(0.1, Weights{1, 0}), (Weights{1, 0}));
  EXPECT_EQ(blend_move(0.3, Weights{0.2, 0.8}).simple_return(ReturnVector{0, 0}), 0.0);
}

TEST(BlendMove, EpsilonRange) {
  EXPECT_THROW(blend_move(0.0, Weights{0, 1}), ConfigError);
  EXPECT_THROW(blend_move(1.0, Weights{0, 1}), ConfigError);
  EXPECT_THROW(SpeculatorPolicy::blend(-0.1), ConfigError);
  EXPECT_NO_THROW(SpeculatorPolicy::blend(0.9));
}

TEST(ShortBlendMove, Examples) {
  const Weights h = short_blend_move(0.1, Weights{0, 1});
  EXPECT_DOUBLE_EQ(h[0], 1.1);
  EXPECT_DOUBLE_EQ(h[1], -0.1);
  EXPECT_EQ(short_blend_move(0.2, Weights::unit(3, 0)), Weights::unit(3, 0));
}

TEST(ShortBlendMove, EpsilonRange) {
  EXPECT_THROW(short_blend_move(1.0 / 3.0, Weights{0, 1}), ConfigError);
  EXPECT_THROW(short_blend_move(0.0, Weights{0, 1}), ConfigError);
  EXPECT_THROW(SpeculatorPolicy::short_blend(0.5), ConfigError);
  EXPECT_NO_THROW(SpeculatorPolicy::short_blend(0.33));
}

TEST(ShortBlendMove, ExtremeRoundStaysSolvent) {
  // s = 1, m = -0.5: the induced return is bounded below by -ε + (1+ε)(-1/2) > -1.
  for (double eps : {0.01, 0.1, 0.2, 0.3, 0.333}) {
    const Weights g{0, 1};
    const ReturnVector x{-0.5, 1.0};
    const double r = short_blend_move(eps, g).simple_return(x);
    EXPECT_NEAR(r, -eps + (1 + eps) * (-0.5), 1e-15);
    EXPECT_GT(r, -1.0);
  }
}

TEST(WitnessMoves, GrossReturnIdentities) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20000; ++i) {
    const std::size_t width = 2 + i % 4;
    const Weights g(random_weights(rng, width, 0.5));
    const ReturnVector x = random_returns(rng, width, 0.1);
    const double s = g.simple_return(x);
    const double m = x.index();
    const double eps = 0.001 + 0.33 * (i % 97) / 97.0;
    ASSERT_TRUE(close_rel(blend_move(eps, g).gross_return(x), 1 + eps * s + (1 - eps) * m, 1e-12));
    ASSERT_TRUE(
        close_rel(short_blend_move(eps, g).gross_return(x), 1 - eps * s + (1 + eps) * m, 1e-12));
    double total = 0.0;
    const Weights h = blend_move(eps, g);
    for (double w : h.values()) total += w;
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(SplitPolicy, Validation) {
  EXPECT_THROW(SpeculatorPolicy::split({}), ConfigError);
  EXPECT_THROW(SpeculatorPolicy::split({{0.5, SpeculatorPolicy::blend(0.1)}}), ConfigError);
  EXPECT_THROW(SpeculatorPolicy::split({{1.5, SpeculatorPolicy::blend(0.1)},
                                        {-0.5, SpeculatorPolicy::hold_index()}}),
               ConfigError);
  EXPECT_EQ(SpeculatorPolicy::blend(0.1).label(), "blend(0.1)");
  EXPECT_EQ(SpeculatorPolicy::short_blend(0.1), SpeculatorPolicy::short_blend(0.1));
  EXPECT_FALSE(SpeculatorPolicy::short_blend(0.1) == SpeculatorPolicy::blend(0.1));
}

// Plays the same path with the given speculators attached; returns the
// ledger after every round for each speculator.
std::vector<std::vector<double>> ledger_paths(const std::vector<SpeculatorPolicy>& policies,
                                              std::uint64_t seed, std::size_t rounds) {
  const GameConfig cfg(2, rounds, 0.01);
  GbmParams params = GbmParams::uniform(3, 0.05, 0.4);
  GbmGenerator gen(params, cfg.dt(), seed);
  std::vector<std::unique_ptr<Speculator>> specs;
  for (const auto& p : policies) specs.push_back(make_speculator(p));
  auto investor = make_investor(InvestorPolicy::fixed(Weights{-0.2, 0.7, 0.5}));
  GameState state(cfg, policies.size());
  std::vector<std::vector<double>> out(policies.size());
  for (std::size_t n = 0; n < rounds; ++n) {
    const Weights g = investor->move(state);
    std::vector<Weights> h;
    for (auto& s : specs) h.push_back(s->move(state, g));
    const ReturnVector x = gen.next();
    state.play_round(g, h, x);
    for (std::size_t j = 0; j < specs.size(); ++j) {
      specs[j]->settle(x);
      out[j].push_back(state.speculator_capitals()[j]);
    }
  }
  return out;
}

TEST(SplitPolicy, SingleChildMatchesChild) {
  const auto p = SpeculatorPolicy::short_blend(0.2);
  const auto paths = ledger_paths({p, SpeculatorPolicy::split({{1.0, p}})}, 4, 1000);
  for (std::size_t n = 0; n < paths[0].size(); ++n) {
    ASSERT_TRUE(close_rel(paths[1][n], paths[0][n], 1e-12));
  }
}

TEST(SplitPolicy, LedgerIsWeightedSumOfChildrenEveryRound) {
  const auto a = SpeculatorPolicy::blend(0.3);
  const auto b = SpeculatorPolicy::short_blend(0.3);
  const auto c = SpeculatorPolicy::hold_index();
  const auto split = SpeculatorPolicy::split({{0.2, a}, {0.5, b}, {0.3, c}});
  const auto paths = ledger_paths({a, b, c, split}, 9, 2000);
  for (std::size_t n = 0; n < paths[0].size(); ++n) {
    const double combined = 0.2 * paths[0][n] + 0.5 * paths[1][n] + 0.3 * paths[2][n];
    ASSERT_TRUE(close_rel(paths[3][n], combined, 1e-12)) << "round " << n;
  }
}

TEST(SplitPolicy, HalfOfTwiceTheTargetReachesTheTarget) {
  const double alpha = 0.1;
  const double index = 1.3;
  const double child1 = (2 / alpha) * index;
  const double child2 = 0.0;
  EXPECT_GE(0.5 * child1 + 0.5 * child2, index / alpha);
}

TEST(InvestorPolicy, BuyAndHoldKeepsShareCounts) {
  const GameConfig cfg(2, 50, 0.01);
  GbmGenerator gen(GbmParams::uniform(3, 0.1, 0.5), cfg.dt(), 21);
  auto investor = make_investor(InvestorPolicy::buy_and_hold(Weights{0.2, 0.3, 0.5}));
  GameState state(cfg);
  std::vector<double> price(3, 1.0);
  for (std::size_t n = 0; n < cfg.num_rounds(); ++n) {
    const Weights g = investor->move(state);
    double value = 0.0;
    for (std::size_t k = 0; k < 3; ++k) value += (k == 0 ? 0.2 : k == 1 ? 0.3 : 0.5) * price[k];
    for (std::size_t k = 0; k < 3; ++k) {
      const double shares0 = (k == 0 ? 0.2 : k == 1 ? 0.3 : 0.5);
      ASSERT_NEAR(g[k], shares0 * price[k] / value, 1e-12);
    }
    const ReturnVector x = gen.next();
    state.play_round(g, Weights::unit(3, 0), x);
    for (std::size_t k = 0; k < 3; ++k) price[k] *= 1 + x[k];
  }
}

TEST(InvestorPolicy, ScheduleExhaustionIsAProtocolError) {
  auto investor = make_investor(InvestorPolicy::schedule({Weights{0.5, 0.5}}));
  GameState state(GameConfig(1, 2, 1.0));
  state.play_round(investor->move(state), Weights{1, 0}, ReturnVector{0, 0});
  EXPECT_THROW(investor->move(state), ProtocolError);
  EXPECT_THROW(InvestorPolicy::schedule({}), ConfigError);
}

TEST(InvestorPolicy, Labels) {
  EXPECT_EQ(InvestorPolicy::hold_index().label(), "hold-index");
  EXPECT_EQ(InvestorPolicy::fixed(Weights{0.5, 0.5}).label(), "fixed:0.5,0.5");
}

TEST(Gbm, ZeroVolatilityGivesPureDrift) {
  GbmGenerator gen(GbmParams::uniform(2, 0.05, 0.0), 0.01, 1);
  for (int i = 0; i < 100; ++i) {
    const ReturnVector x = gen.next();
    ASSERT_EQ(x[0], 0.05 * 0.01);
    ASSERT_EQ(x[1], 0.05 * 0.01);
  }
}

TEST(Gbm, SameSeedSamePath) {
  GbmParams p = GbmParams::uniform(3, 0.05, 0.3);
  p.correlation[1][2] = p.correlation[2][1] = 0.8;
  GbmGenerator a(p, 1e-3, 42), b(p, 1e-3, 42), c(p, 1e-3, 43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const ReturnVector xa = a.next();
    ASSERT_EQ(xa, b.next());
    differs = differs || !(xa == c.next());
  }
  EXPECT_TRUE(differs);
}

TEST(Gbm, SampleCorrelationMatchesTarget) {
  GbmParams p = GbmParams::uniform(2, 0.0, 1.0);
  p.correlation[0][1] = p.correlation[1][0] = 0.5;
  GbmGenerator gen(p, 1e-4, 8);
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 200000; ++i) {
    const ReturnVector x = gen.next();
    sxy += x[0] * x[1];
    sxx += x[0] * x[0];
    syy += x[1] * x[1];
  }
  EXPECT_NEAR(sxy / std::sqrt(sxx * syy), 0.5, 0.01);
  EXPECT_NEAR(sxx / 200000, 1e-4, 2e-6);
  EXPECT_EQ(gen.clamp_count(), 0u);
}

TEST(Gbm, ReturnsAreClampedAboveMinusOne) {
  GbmGenerator gen(GbmParams::uniform(2, 0.0, 5.0), 1.0, 8);
  for (int i = 0; i < 1000; ++i) {
    const ReturnVector x = gen.next();
    ASSERT_GE(x[0], kReturnFloor);
    ASSERT_GE(x[1], kReturnFloor);
  }
  EXPECT_GT(gen.clamp_count(), 0u);
}

TEST(Gbm, MomentRecoveryForSingleAsset) {
  const GameConfig cfg(1, 100000, 1e-3);
  auto investor = make_investor(InvestorPolicy::fixed(Weights{0, 1}));
  auto speculator = make_speculator(SpeculatorPolicy::hold_index());
  GbmMarket market(GbmParams::uniform(2, 0.05, 0.2), cfg.dt(), 2024);
  const MomentSummary s = run_game(cfg, *investor, *speculator, market).moments.summarize();
  EXPECT_LT(std::fabs(s.mu_s - 0.05), 0.07);
  EXPECT_LT(std::fabs(s.sigma_s_sq - 0.04), 0.002);
  EXPECT_EQ(market.clamp_count(), 0u);
}

TEST(Gbm, CorrelationValidation) {
  EXPECT_THROW(correlation_factor({{1, 0.5}, {0.4, 1}}), ConfigError);
  EXPECT_THROW(correlation_factor({{1, 2}, {2, 1}}), ConfigError);
  EXPECT_THROW(correlation_factor({{0.9, 0}, {0, 1}}), ConfigError);
  EXPECT_THROW(correlation_factor({{1, 0.9, -0.9}, {0.9, 1, 0.9}, {-0.9, 0.9, 1}}), ConfigError);
  EXPECT_THROW(correlation_factor({{1, 0}}), ConfigError);
  // Singular but PSD: perfectly correlated pair.
  const auto f = correlation_factor({{1, 1}, {1, 1}});
  EXPECT_NEAR(f[0] * f[2] + f[1] * f[3], 1.0, 1e-12);
  EXPECT_NEAR(f[2] * f[2] + f[3] * f[3], 1.0, 1e-12);
}

TEST(Gbm, FactorReproducesCorrelation) {
  const std::vector<std::vector<double>> c{{1, 0.3, -0.2}, {0.3, 1, 0.5}, {-0.2, 0.5, 1}};
  const auto f = correlation_factor(c);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double v = 0;
      for (int k = 0; k < 3; ++k) v += f[i * 3 + k] * f[j * 3 + k];
      EXPECT_NEAR(v, c[i][j], 1e-12);
    }
  }
}

TEST(Gbm, MatchedPathsShareTheirNoise) {
  const GbmParams p = GbmParams::uniform(2, 0.05, 0.2);
  const auto paths = matched_gbm_paths(p, 1.0, {0.1, 0.01}, 5);
  ASSERT_EQ(paths.size(), 2u);
  ASSERT_EQ(paths[0].size(), 10u);
  ASSERT_EQ(paths[1].size(), 100u);
  // Coarse return minus drift equals the fine noise summed over its block.
  for (std::size_t n = 0; n < 10; ++n) {
    double fine_noise = 0.0;
    for (std::size_t j = 0; j < 10; ++j) fine_noise += paths[1][10 * n + j][0] - 0.05 * 0.01;
    EXPECT_NEAR(paths[0][n][0] - 0.05 * 0.1, fine_noise, 1e-12);
  }
  EXPECT_THROW(matched_gbm_paths(p, 1.0, {0.03, 0.01}, 5), ConfigError);
  EXPECT_THROW(matched_gbm_paths(p, 1.0, {0.3}, 5), ConfigError);
}

TEST(ReplayMarket, EmitsRowsThenExhausts) {
  const std::vector<ReturnVector> rows{{0.01, 0.02}, {-0.01, 0.0}, {0.0, 0.03}};
  auto market = make_market(MarketModel::deterministic(rows), GameConfig(1, 3, 1.0));
  GameState state(GameConfig(1, 4, 1.0));
  for (const auto& r : rows) {
    const ReturnVector x = market->move(state, Weights{1, 0}, {});
    EXPECT_EQ(x, r);
    state.play_round(Weights{1, 0}, Weights{1, 0}, x);
  }
  EXPECT_THROW(market->move(state, Weights{1, 0}, {}), ProtocolError);
}

TEST(AdversarialMarket, AlternatingAndContrarianRules) {
  AdversarialMarket alt(AdversarialRule::kAlternating, 0.02);
  GameState state(GameConfig(2, 4, 1.0));
  const Weights g = Weights::unit(3, 0);
  ReturnVector x = alt.move(state, g, {});
  EXPECT_EQ(x, (ReturnVector{0.02, -0.02, 0.02}));
  state.play_round(g, g, x);
  EXPECT_EQ(alt.move(state, g, {}), (ReturnVector{-0.02, 0.02, -0.02}));

  AdversarialMarket con(AdversarialRule::kContrarian, 0.02);
  const std::vector<Weights> h{Weights{0.5, 0.6, -0.1}};
  EXPECT_EQ(con.move(state, g, h), (ReturnVector{-0.02, -0.02, 0.02}));
  EXPECT_THROW(AdversarialMarket(AdversarialRule::kAlternating, 1.0), ConfigError);
}

TEST(MarketModel, GbmWidthMustMatchGame) {
  EXPECT_THROW(make_market(MarketModel::gbm_model(GbmParams::uniform(3, 0, 0.1), 1),
                           GameConfig(1, 10, 0.1)),
               ConfigError);
}

}  // namespace
}  // namespace capm
