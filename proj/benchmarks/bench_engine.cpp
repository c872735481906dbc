#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "capm/bounds.hpp"
#include "capm/experiment.hpp"
#include "capm/moments.hpp"
#include "capm/protocol.hpp"
#include "capm/strategies.hpp"

namespace {

using namespace capm;

GbmParams desk_market() {
  GbmParams p = GbmParams::uniform(2, 0.05, 0.2);
  p.mu[1] = 0.08;
  p.sigma[1] = 0.3;
  p.correlation[0][1] = p.correlation[1][0] = 0.5;
  return p;
}

void BM_MomentUpdate(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<double> s(4096), m(4096);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = u(rng);
    m[i] = u(rng);
  }
  MomentAccumulator acc(1e-3);
  std::size_t i = 0;
  for (auto _ : state) {
    acc.update(s[i], m[i]);
    i = (i + 1) & 4095;
  }
  benchmark::DoNotOptimize(acc.sum_sm());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MomentUpdate);

void BM_GbmNext(benchmark::State& state) {
  GbmParams p = GbmParams::uniform(static_cast<std::size_t>(state.range(0)), 0.05, 0.2);
  GbmGenerator gen(p, 1e-3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(gen.next());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GbmNext)->Arg(2)->Arg(4)->Arg(16);

void BM_PlayRound(benchmark::State& state) {
  const std::size_t specs = static_cast<std::size_t>(state.range(0));
  const GameConfig cfg(1, 100000, 1e-3);
  GameState game(cfg, specs);
  const Weights g{0.5, 0.5};
  std::vector<Weights> h(specs, blend_move(0.1, g));
  const ReturnVector x{0.001, -0.002};
  for (auto _ : state) {
    if (game.finished()) {
      state.PauseTiming();
      game = GameState(cfg, specs);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(game.play_round(g, h, x));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PlayRound)->Arg(1)->Arg(9);

void BM_WitnessGame(benchmark::State& state) {
  WitnessGameSpec spec;
  spec.config = GameConfig(1, static_cast<std::size_t>(state.range(0)), 1e-3);
  spec.investor = InvestorPolicy::fixed(Weights{0.5, 0.5});
  spec.epsilons = {0.01, 0.1, 0.3};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    spec.market = MarketModel::gbm_model(desk_market(), seed++);
    benchmark::DoNotOptimize(play_witness_game(spec).record.summary.mu_s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WitnessGame)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TightestBounds(benchmark::State& state) {
  MomentAccumulator acc(1e-3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 0.006);
  for (int i = 0; i < 10000; ++i) acc.update(z(rng), z(rng));
  const MomentSummary s = acc.summarize();
  const auto grid = default_epsilon_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tightest_upper_bound(s, 0.01, grid));
    benchmark::DoNotOptimize(tightest_lower_bound(s, 0.01, grid));
  }
}
BENCHMARK(BM_TightestBounds);

}  // namespace

BENCHMARK_MAIN();
