#include <benchmark/benchmark.h>

#include <vector>

#include "qroute/befs.hpp"
#include "qroute/bench.hpp"
#include "qroute/netgraph.hpp"
#include "qroute/skr_model.hpp"

namespace {

using namespace qroute;

PhysicalParams default_params() {
  PhysicalParams p;
  p.fidelity = 0.96;
  p.coherence_time_s = 10.0;
  return p;
}

void BM_SimulateSkr(benchmark::State& state) {
  const auto n_links = static_cast<std::size_t>(state.range(0));
  const auto n_samples = static_cast<std::uint64_t>(state.range(1));
  ChainSpec chain;
  chain.lengths_km.assign(n_links, 120.0 / static_cast<double>(n_links));
  const auto params = default_params();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_skr(chain, params, n_samples, seed++));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n_samples));
}
BENCHMARK(BM_SimulateSkr)
    ->Args({1, 1000})
    ->Args({2, 1000})
    ->Args({4, 1000})
    ->Args({4, 10000});

void BM_Dominates(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> p(n), q(n);
  SplitMix64 rng(7);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = rng.uniform(10, 100);
    q[i] = rng.uniform(10, 100);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(dominates(p, q));
  }
}
BENCHMARK(BM_Dominates)->Arg(4)->Arg(16)->Arg(64);

void BM_WaxmanGenerate(benchmark::State& state) {
  GraphGenConfig cfg;
  cfg.n_repeaters = static_cast<int>(state.range(0));
  cfg.seed = 11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(waxman_generate(cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_WaxmanGenerate)->Arg(25)->Arg(100);

void BM_PruneBiconnected(benchmark::State& state) {
  GraphGenConfig cfg;
  cfg.n_repeaters = static_cast<int>(state.range(0));
  const auto [g, seed] = suite_graph(cfg, cfg.n_repeaters, 0, 3);
  (void)seed;
  const auto [s, t] = g.end_nodes();
  for (auto _ : state) {
    benchmark::DoNotOptimize(prune_to_st_biconnected(g, s, t));
  }
}
BENCHMARK(BM_PruneBiconnected)->Arg(25)->Arg(100);

void BM_MeritHeuristic(benchmark::State& state) {
  GraphGenConfig cfg;
  cfg.n_repeaters = 25;
  const auto [g, seed] = suite_graph(cfg, cfg.n_repeaters, 0, 5);
  (void)seed;
  const auto [s, t] = g.end_nodes();
  QueryCounter counter;
  const SkrEstimator estimator(default_params(), 1000, 42, &counter);
  MeritEvaluator merit(MeritKind::HeuristicBound, g, t, estimator);
  PathRoute prefix;
  prefix.nodes.push_back(s);
  // Walk two hops toward the target to get a prefix of realistic shape.
  for (int hop = 0; hop < 2; ++hop) {
    const auto& nb = g.neighbors(prefix.end());
    for (const auto& [next, len] : nb) {
      (void)len;
      if (!prefix.contains(next) && next != t) {
        prefix = prefix.extended(g, next);
        break;
      }
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(merit(prefix));
  }
}
BENCHMARK(BM_MeritHeuristic);

void BM_SearchSmallGraph(benchmark::State& state) {
  GraphGenConfig cfg;
  cfg.n_repeaters = 8;
  const auto [g, seed] = suite_graph(cfg, cfg.n_repeaters, 0, 9);
  (void)seed;
  const auto [s, t] = g.end_nodes();
  const NetworkGraph pruned = prune_to_st_biconnected(g, s, t);
  for (auto _ : state) {
    QueryCounter counter;
    const SkrEstimator estimator(default_params(), 500, 42, &counter);
    benchmark::DoNotOptimize(
        befs_search(pruned, s, t, estimator, MeritKind::HeuristicBound, true));
  }
}
BENCHMARK(BM_SearchSmallGraph);

}  // namespace

BENCHMARK_MAIN();
