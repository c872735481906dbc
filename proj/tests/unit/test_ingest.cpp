#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "capm/errors.hpp"
#include "capm/experiment.hpp"
#include "capm/ingest.hpp"
#include "support/oracle.hpp"

namespace capm {
namespace {

ReturnSeries parse(const std::string& text, double dt = 1.0) {
  std::istringstream in(text);
  return parse_csv(in, dt, "mem.csv");
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const IngestError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return 0;
}

TEST(ParseCsv, DateLabelledRow) {
  const ReturnSeries s = parse("date,index,stock\n2020-01-02,0.005,0.01\n", 1.0 / 252);
  EXPECT_EQ(s.labels, (std::vector<std::string>{"index", "stock"}));
  ASSERT_EQ(s.rounds(), 1u);
  EXPECT_EQ(s.rows[0], (ReturnVector{0.005, 0.01}));
  EXPECT_EQ(game_config(s).num_securities(), 1u);
  EXPECT_DOUBLE_EQ(s.dt, 1.0 / 252);
  EXPECT_EQ(s.source, "mem.csv");
}

TEST(ParseCsv, NoLabelColumnScientificAndSigns) {
  const ReturnSeries s = parse("m,a,b\n1e-3,+2.5E-2,-0.5\n0,0,0\n");
  EXPECT_EQ(s.width(), 3u);
  EXPECT_EQ(s.rows[0], (ReturnVector{1e-3, 2.5e-2, -0.5}));
}

TEST(ParseCsv, RoundHeaderIsALabelColumnEvenWhenNumeric) {
  const ReturnSeries s = parse("round,index,s1\n1,0.01,0.02\n2,0.03,0.04\n");
  EXPECT_EQ(s.width(), 2u);
  EXPECT_EQ(s.rows[1], (ReturnVector{0.03, 0.04}));
}

TEST(ParseCsv, ToleratesBomCrlfAndBlankLines) {
  const ReturnSeries s = parse("\xEF\xBB\xBF" "date,index,fund\r\n\r\nd1,0.01,0.02\r\nd2,0.0,-0.01\r\n\n");
  EXPECT_EQ(s.labels.front(), "index");
  EXPECT_EQ(s.rounds(), 2u);
}

TEST(ParseCsv, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("date,index,stock\n2020-01-02,0.005,-1.5\n"), 2u);
  EXPECT_EQ(error_line("index,stock\n0.1,0.2\n0.1,-1\n"), 3u);
  EXPECT_EQ(error_line("index,stock\n0.1,0.2\n0.1\n"), 3u);
  EXPECT_EQ(error_line("index,stock\n0.1,0.2,0.3\n"), 2u);
  EXPECT_EQ(error_line("index,stock\n0.1,abc\n"), 2u);
  EXPECT_EQ(error_line("index,stock\n0.1,\n"), 2u);
  EXPECT_EQ(error_line("index,stock\n0.1,nan\n"), 2u);
  EXPECT_EQ(error_line("index,stock\n0.1,inf\n"), 2u);
}

TEST(ParseCsv, EmptyInputs) {
  try {
    parse("date,index,stock\n");
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_NE(std::string(e.what()).find("empty series"), std::string::npos);
  }
  try {
    parse("");
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_NE(std::string(e.what()).find("empty file"), std::string::npos);
    EXPECT_EQ(e.line(), 0u);
  }
}

TEST(LoadCsv, MissingFileIsAnIngestError) {
  EXPECT_THROW(load_csv("/nonexistent/returns.csv", 1.0), IngestError);
}

TEST(WriteCsv, RoundTripPreservesEveryBit) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  ReturnSeries s;
  s.labels = {"index", "a", "b"};
  s.dt = 0.01;
  for (int n = 0; n < 500; ++n) s.rows.push_back(ReturnVector{u(rng), u(rng) * 1e-7, std::fabs(u(rng)) * 1e5});
  std::ostringstream out;
  write_csv(s, out);
  EXPECT_EQ(out.str().substr(0, 16), "round,index,a,b\n");
  std::istringstream in(out.str());
  const ReturnSeries back = parse_csv(in, 0.01);
  EXPECT_EQ(back.labels, s.labels);
  ASSERT_EQ(back.rounds(), s.rounds());
  for (std::size_t n = 0; n < s.rounds(); ++n) ASSERT_EQ(back.rows[n], s.rows[n]);
}

TEST(AsMarket, ReplaysRowsThenExhausts) {
  const ReturnSeries s = parse("index,s\n0.01,0.02\n-0.01,0.0\n0.0,0.03\n");
  const MarketModel model = as_market(s);
  EXPECT_EQ(model.kind, MarketModel::Kind::kDeterministic);
  const GameConfig cfg = game_config(s);
  EXPECT_EQ(cfg.num_rounds(), 3u);
  auto market = make_market(model, cfg);
  GameState state(cfg);
  for (std::size_t n = 0; n < 3; ++n) {
    const ReturnVector x = market->move(state, Weights{1, 0}, {});
    EXPECT_EQ(x, s.rows[n]);
    state.play_round(Weights{1, 0}, Weights{1, 0}, x);
  }
  EXPECT_THROW(market->move(state, Weights{1, 0}, {}), ProtocolError);
}

TEST(AsMarket, GbmPathRoundTripGivesIdenticalMoments) {
  WitnessGameSpec spec;
  spec.config = GameConfig(1, 5000, 1e-3);
  spec.investor = InvestorPolicy::fixed(Weights{0.4, 0.6});
  spec.market = MarketModel::gbm_model(GbmParams::uniform(2, 0.05, 0.25), 12);
  spec.epsilons = {0.1};
  const WitnessGame a = play_witness_game(spec);

  const auto path = std::filesystem::temp_directory_path() / "capm_ingest_roundtrip.csv";
  save_csv(series_from_history(a.state.history(), spec.config.dt()), path);
  const ReturnSeries loaded = load_csv(path, spec.config.dt());
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.labels, (std::vector<std::string>{"index", "s1"}));

  spec.config = game_config(loaded);
  spec.market = as_market(loaded);
  const WitnessGame b = play_witness_game(spec);
  const MomentSummary& x = a.record.summary;
  const MomentSummary& y = b.record.summary;
  EXPECT_TRUE(testing::close_rel(x.mu_s, y.mu_s, 1e-12));
  EXPECT_TRUE(testing::close_rel(x.sigma_sm, y.sigma_sm, 1e-12));
  EXPECT_TRUE(testing::close_rel(x.lambda_s, y.lambda_s, 1e-12));
  EXPECT_TRUE(testing::close_rel(x.sigma_2ms_sq, y.sigma_2ms_sq, 1e-12));
  EXPECT_EQ(a.record.investor_capital, b.record.investor_capital);
}

TEST(AsMarket, ReplaysAreDeterministic) {
  const ReturnSeries s = parse("index,s\n0.01,0.02\n-0.01,0.0\n0.0,0.03\n");
  WitnessGameSpec spec;
  spec.config = game_config(s);
  spec.investor = InvestorPolicy::buy_and_hold(Weights{0.5, 0.5});
  spec.market = as_market(s);
  spec.epsilons = {0.1};
  const WitnessGame a = play_witness_game(spec);
  const WitnessGame b = play_witness_game(spec);
  for (std::size_t n = 0; n < 3; ++n) {
    const auto ga = a.state.history().investor_move(n);
    const auto gb = b.state.history().investor_move(n);
    EXPECT_TRUE(std::equal(ga.begin(), ga.end(), gb.begin()));
  }
}

TEST(IndexOnlySeries, HoldIndexGivesTrackingPath) {
  const ReturnSeries s = with_security_column(parse("index\n0.01\n-0.02\n0.005\n"));
  ASSERT_EQ(s.width(), 2u);
  EXPECT_EQ(s.rows[1], (ReturnVector{-0.02, -0.02}));
  EXPECT_THROW(game_config(parse("index\n0.01\n")), ConfigError);

  WitnessGameSpec spec;
  spec.config = game_config(s);
  spec.investor = InvestorPolicy::hold_index();
  spec.market = as_market(s);
  spec.epsilons = {0.1};
  const WitnessGame g = play_witness_game(spec);
  EXPECT_EQ(capm_residual(g.record.summary), 0.0);
  EXPECT_EQ(deficit_residual(g.record.summary), 0.0);
}

}  // namespace
}  // namespace capm
