// Serial reference against the OpenMP version of each parallel kernel.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include "respgames/logic/formula.hpp"
#include "respgames/model/parser.hpp"
#include "respgames/oracle/oracle.hpp"
#include "respgames/synth/synth.hpp"
#include "respgames/trace/history.hpp"

using namespace respgames;

namespace {

const model::Psmas& ball() {
  static const model::Psmas m = model::build_psmas(model::load_game(std::string(RESPGAMES_FIXTURE_DIR) + "/ball.game"));
  return m;
}

poly::ParamValuation point(const model::Psmas& m) {
  return {{*m.names().lookup("x1"), poly::Rational(1, 3)}, {*m.names().lookup("x2"), poly::Rational(3, 5)}};
}

void BM_Simulate(benchmark::State& st) {
  const auto& m = ball();
  auto psi = logic::parse_path_formula("F<=4 (collision | dropped)", logic::vocabulary(m));
  oracle::SimConfig cfg;
  cfg.samples = 200000;
  cfg.valuation = point(m);
  cfg.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(oracle::estimate_probability(m, cfg, *psi));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(cfg.samples));
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Enumerate(benchmark::State& st) {
  const auto& m = ball();
  const int depth = 6;
  for (auto _ : st) {
    auto hs = st.range(0) ? trace::enumerate_histories_parallel(m, m.csg().initial, depth)
                          : trace::enumerate_histories(m, m.csg().initial, depth);
    benchmark::DoNotOptimize(hs.data());
  }
}
BENCHMARK(BM_Enumerate)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_GridBestResponse(benchmark::State& st) {
  const auto& m = ball();
  auto u = synth::build_utility(m, m.csg().initial, 2, synth::UtilityConfig{});
  poly::ParamValuation others{{*m.names().lookup("x2"), poly::Rational(1, 2)}};
  for (auto _ : st) benchmark::DoNotOptimize(oracle::grid_best_response(u, 0, others, 2000, st.range(0) != 0));
}
BENCHMARK(BM_GridBestResponse)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_SolveNe(benchmark::State& st) {
  auto sys = synth::parse_ne_system({"2*x^2 + x*y - 2 = 0", "y - x^2 = 0"});
  synth::SolveOptions opt;
  opt.starts = 256;
  opt.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(synth::solve_ne(sys, opt));
}
BENCHMARK(BM_SolveNe)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
