#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "qroute/metaheuristics.hpp"
#include "qroute/netgraph.hpp"
#include "qroute/skr_model.hpp"
#include "test_helpers.hpp"

using namespace qroute;
using qroute_test::make_graph;

namespace {

PhysicalParams params_with(double fidelity, double coherence) {
  PhysicalParams p;
  p.fidelity = fidelity;
  p.coherence_time_s = coherence;
  return p;
}

/// Direct edge plus two detours; the 30+30 detour beats the 50 km link,
/// the 45+45 one does not. Minimum-length path is the direct edge.
NetworkGraph detour_graph() {
  return make_graph({{0, 0}, {50, 0}, {25, 10}, {25, -10}},
                    {{0, 1, 50.0},
                     {0, 2, 30.0},
                     {2, 1, 30.0},
                     {0, 3, 45.0},
                     {3, 1, 45.0}});
}

/// Three-hop line whose only alternative is a long chord to the middle:
/// the shortest path is one link past the fidelity cutoff at F = 0.94.
NetworkGraph dead_line_graph() {
  return make_graph(
      {{0, 0}, {90, 0}, {30, 0}, {60, 0}},
      {{0, 2, 30.0}, {2, 3, 30.0}, {3, 1, 30.0}, {0, 3, 61.0}});
}

NetworkGraph complete_five() {
  std::vector<std::pair<double, double>> coords{
      {0, 0}, {40, 0}, {10, 10}, {20, -10}, {30, 10}};
  std::vector<std::tuple<int, int, double>> edges;
  for (int u = 0; u < 5; ++u) {
    for (int v = u + 1; v < 5; ++v) edges.emplace_back(u, v, 12.0 + u + v);
  }
  return make_graph(coords, edges);
}

bool is_simple_st_path(const NetworkGraph& g, const PathRoute& p) {
  if (p.nodes.size() < 2 || p.nodes.front() != 0 || p.nodes.back() != 1) {
    return false;
  }
  const std::set<int> uniq(p.nodes.begin(), p.nodes.end());
  if (uniq.size() != p.nodes.size()) return false;
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    if (!g.has_edge(p.nodes[i], p.nodes[i + 1])) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("metaheuristics") {

TEST_CASE("cooling schedules interpolate as specified") {
  const auto lin = CoolingSchedule::linear(2.0);
  CHECK(lin.temperature(0, 4) == doctest::Approx(2.0));
  CHECK(lin.temperature(1, 4) == doctest::Approx(1.5));
  CHECK(lin.temperature(2, 4) == doctest::Approx(1.0));
  CHECK(lin.temperature(4, 4) == doctest::Approx(0.0));
  CHECK(lin.temperature(3, 0) == 0.0);  // degenerate runs are greedy

  const auto exp = CoolingSchedule::exponential(2.0, 0.01);
  CHECK(exp.temperature(0, 10) == doctest::Approx(2.0));
  CHECK(exp.temperature(10, 10) == doctest::Approx(0.01));
  CHECK(exp.temperature(1, 2) == doctest::Approx(2.0 * std::sqrt(0.005)));

  CHECK_NOTHROW(CoolingSchedule::linear(0.0).validate());
  CHECK_THROWS_AS(CoolingSchedule::linear(-1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CoolingSchedule::exponential(0.0, 0.01).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(CoolingSchedule::exponential(2.0, 0.0).validate(),
                  std::invalid_argument);
}

TEST_CASE("mutations enumerate insertions and splices exactly once") {
  const auto g = complete_five();
  const auto direct = PathRoute::from_nodes(g, {0, 1});
  const auto direct_muts = enumerate_mutations(g, direct);
  REQUIRE(direct_muts.size() == 3);
  CHECK(direct_muts[0].nodes == std::vector<int>{0, 2, 1});
  CHECK(direct_muts[1].nodes == std::vector<int>{0, 3, 1});
  CHECK(direct_muts[2].nodes == std::vector<int>{0, 4, 1});

  const auto via2 = PathRoute::from_nodes(g, {0, 2, 1});
  const auto muts = enumerate_mutations(g, via2);
  REQUIRE(muts.size() == 5);
  CHECK(muts[0].nodes == std::vector<int>{0, 1});           // splice 2 out
  CHECK(muts[1].nodes == std::vector<int>{0, 2, 3, 1});     // insert on (2,1)
  CHECK(muts[2].nodes == std::vector<int>{0, 2, 4, 1});
  CHECK(muts[3].nodes == std::vector<int>{0, 3, 2, 1});     // insert on (0,2)
  CHECK(muts[4].nodes == std::vector<int>{0, 4, 2, 1});
}

TEST_CASE("an isolated path has no mutations and costs no randomness") {
  // Two disjoint detours, no chord: [0,2,1] cannot change one node at a time.
  const auto g =
      make_graph({{0, 0}, {20, 0}, {10, 8}, {10, -8}},
                 {{0, 2, 13.0}, {2, 1, 13.0}, {0, 3, 13.0}, {3, 1, 13.0}});
  const auto p = PathRoute::from_nodes(g, {0, 2, 1});
  CHECK(enumerate_mutations(g, p).empty());

  SplitMix64 used(5), fresh(5);
  const auto same = random_mutation(g, p, used);
  CHECK(same.nodes == p.nodes);
  CHECK(used.next() == fresh.next());  // no draw was consumed
}

TEST_CASE("random mutation picks uniformly") {
  const auto g = complete_five();
  const auto direct = PathRoute::from_nodes(g, {0, 1});
  SplitMix64 rng(99);
  std::array<int, 5> counts{};
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const auto m = random_mutation(g, direct, rng);
    counts[static_cast<std::size_t>(m.nodes[1])]++;
  }
  CHECK(counts[0] == 0);
  CHECK(counts[1] == 0);
  const double expected = n / 3.0;
  const double four_sigma = 4.0 * std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
  for (int b = 2; b <= 4; ++b) {
    CHECK(std::abs(counts[static_cast<std::size_t>(b)] - expected) < four_sigma);
  }
}

TEST_CASE("penalized score is the rate, or minus penalty times edges") {
  QueryCounter counter;
  const SkrEstimator live(params_with(0.96, 10.0), 1000, 3, &counter);
  const auto g = detour_graph();
  const auto good = PathRoute::from_nodes(g, {0, 2, 1});
  CHECK(penalized_skr(good, live, 2.0) == live.evaluate_route(good).skr_hz);

  const SkrEstimator dead(params_with(0.94, 10.0), 1000, 3, &counter);
  const auto line = dead_line_graph();
  const auto zero = PathRoute::from_nodes(line, {0, 2, 3, 1});
  CHECK(penalized_skr(zero, dead, 2.0) == -6.0);
  const double unpenalized = penalized_skr(zero, dead, 0.0);
  CHECK(unpenalized == 0.0);
  CHECK_FALSE(std::signbit(unpenalized));
}

TEST_CASE("annealing with zero steps reports the starting path") {
  const auto g = detour_graph();
  QueryCounter counter;
  const SkrEstimator estimator(params_with(0.96, 10.0), 500, 11, &counter);
  SaConfig cfg;
  cfg.n_steps = 0;
  const auto r = simulated_annealing(g, 0, 1, estimator, cfg);
  CHECK(r.final_path.route.nodes == std::vector<int>{0, 1});
  CHECK(r.final_path.queries == 1);
  CHECK(r.best_seen.route.nodes == r.final_path.route.nodes);
  CHECK(r.best_seen.skr_hz == r.final_path.skr_hz);
}

TEST_CASE("greedy annealing climbs to the paying detour and stays") {
  const auto g = detour_graph();
  QueryCounter counter;
  const SkrEstimator estimator(params_with(0.96, 10.0), 500, 11, &counter);
  SaConfig cfg;
  cfg.n_steps = 30;
  cfg.schedule = CoolingSchedule::linear(0.0);
  cfg.seed = 7;
  const auto r = simulated_annealing(g, 0, 1, estimator, cfg);
  CHECK(r.final_path.route.nodes == std::vector<int>{0, 2, 1});
  CHECK(r.best_seen.route.nodes == std::vector<int>{0, 2, 1});
  CHECK(r.final_path.queries == 31);  // one per step plus the start
  CHECK(r.best_seen.skr_hz ==
        estimator.evaluate_route(PathRoute::from_nodes(g, {0, 2, 1})).skr_hz);
}

TEST_CASE("the length penalty walks the annealer off a dead shortest path") {
  const auto g = dead_line_graph();
  QueryCounter counter;
  const SkrEstimator estimator(params_with(0.94, 10.0), 2000, 13, &counter);
  SaConfig cfg;
  cfg.n_steps = 10;
  cfg.schedule = CoolingSchedule::linear(0.0);
  const auto r = simulated_annealing(g, 0, 1, estimator, cfg);
  // Start [0,2,3,1] scores -6; splicing node 2 out is the only move and the
  // two-link chord is alive, so greedy acceptance takes it and keeps it.
  CHECK(r.final_path.route.nodes == std::vector<int>{0, 3, 1});
  CHECK(r.final_path.skr_hz > 0.0);
  CHECK(r.best_seen.route.nodes == r.final_path.route.nodes);
}

TEST_CASE("annealing bookkeeping holds across random graphs") {
  GraphGenConfig gen;
  gen.n_repeaters = 6;
  int tested = 0;
  for (std::uint64_t seed = 0; tested < 10 && seed < 100; ++seed) {
    gen.seed = 3000 + seed;
    const auto g = waxman_generate(gen);
    if (!graph_distance(g, 0, 1).has_value()) continue;
    ++tested;
    QueryCounter counter;
    const SkrEstimator estimator(params_with(0.96, 10.0), 300, seed, &counter);
    SaConfig cfg;
    cfg.n_steps = 40;
    cfg.schedule = CoolingSchedule::exponential(2.0, 0.01);
    cfg.seed = seed * 17 + 1;
    const auto r = simulated_annealing(g, 0, 1, estimator, cfg);
    CHECK(r.final_path.queries == 41);
    CHECK(r.best_seen.queries == 41);
    CHECK(is_simple_st_path(g, r.final_path.route));
    CHECK(is_simple_st_path(g, r.best_seen.route));
    CHECK(r.best_seen.skr_hz >= r.final_path.skr_hz);
  }
  CHECK(tested == 10);
}

TEST_CASE("annealing rejects malformed configs") {
  const auto g = detour_graph();
  QueryCounter counter;
  const SkrEstimator estimator(params_with(0.96, 10.0), 100, 1, &counter);
  SaConfig bad_steps;
  bad_steps.n_steps = -1;
  CHECK_THROWS_AS(simulated_annealing(g, 0, 1, estimator, bad_steps),
                  std::invalid_argument);
  SaConfig bad_penalty;
  bad_penalty.length_penalty = -0.5;
  CHECK_THROWS_AS(simulated_annealing(g, 0, 1, estimator, bad_penalty),
                  std::invalid_argument);
  SaConfig bad_schedule;
  bad_schedule.schedule = CoolingSchedule::exponential(2.0, 0.0);
  CHECK_THROWS_AS(simulated_annealing(g, 0, 1, estimator, bad_schedule),
                  std::invalid_argument);
}

TEST_CASE("softmax selection matches its closed-form probabilities") {
  SplitMix64 rng(4242);
  const std::vector<double> skrs{1.0, 2.0};
  const int n = 100000;
  int first = 0;
  for (int i = 0; i < n; ++i) {
    if (select_parent(skrs, 1.0, rng) == 0) ++first;
  }
  // P(index 0) = e^-1 / (1 + e^-1) = 0.26894...
  const double p = std::exp(-1.0) / (1.0 + std::exp(-1.0));
  CHECK(std::abs(first - n * p) < 4.0 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("zero-temperature selection is uniform over the argmax set") {
  SplitMix64 rng(11);
  const std::vector<double> skrs{2.0, 5.0, 5.0};
  const int n = 20000;
  std::array<int, 3> counts{};
  for (int i = 0; i < n; ++i) counts[select_parent(skrs, 0.0, rng)]++;
  CHECK(counts[0] == 0);
  CHECK(std::abs(counts[1] - n / 2) < 4.0 * std::sqrt(n * 0.25));

  CHECK_THROWS_AS(select_parent({}, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(select_parent(skrs, -1.0, rng), std::invalid_argument);
}

TEST_CASE("recombination crosses wherever an edge links the parents") {
  const auto g = make_graph({{0, 0}, {40, 0}, {15, 10}, {25, -10}},
                            {{0, 2, 18.0},
                             {2, 1, 25.0},
                             {0, 3, 27.0},
                             {3, 1, 18.0},
                             {2, 3, 22.0}});
  const auto p1 = PathRoute::from_nodes(g, {0, 2, 1});
  const auto p2 = PathRoute::from_nodes(g, {0, 3, 1});
  // Interior cut (2, 3) builds the long detour; cuts at the end nodes
  // collapse to one of the parents.
  const auto kids = enumerate_recombinations(g, p1, p2);
  REQUIRE(kids.size() == 3);
  CHECK(kids[0].nodes == std::vector<int>{0, 2, 1});
  CHECK(kids[1].nodes == std::vector<int>{0, 2, 3, 1});
  CHECK(kids[2].nodes == std::vector<int>{0, 3, 1});
  const auto flipped = enumerate_recombinations(g, p2, p1);
  REQUIRE(flipped.size() == 3);
  CHECK(flipped[2].nodes == std::vector<int>{0, 3, 2, 1});

  // A path crossed with itself can only reproduce itself.
  const auto self = enumerate_recombinations(g, p2, p2);
  REQUIRE(self.size() == 1);
  CHECK(self[0].nodes == p2.nodes);
}

TEST_CASE("recombination cuts the loops it creates") {
  // K4 minus the direct 0-1 edge; parents traverse 2 and 3 in opposite
  // orders, so every interior crossover revisits a node.
  const auto g = make_graph({{0, 0}, {30, 0}, {10, 10}, {20, -10}},
                            {{0, 2, 14.0},
                             {2, 3, 15.0},
                             {3, 1, 14.0},
                             {0, 3, 22.0},
                             {2, 1, 22.0}});
  const auto p1 = PathRoute::from_nodes(g, {0, 2, 3, 1});
  const auto p2 = PathRoute::from_nodes(g, {0, 3, 2, 1});
  const auto kids = enumerate_recombinations(g, p1, p2);
  REQUIRE(kids.size() == 3);  // both parents plus the loop-cut short path
  CHECK(kids[0].nodes == std::vector<int>{0, 2, 1});
  CHECK(kids[1].nodes == std::vector<int>{0, 2, 3, 1});
  CHECK(kids[2].nodes == std::vector<int>{0, 3, 2, 1});
  for (const auto& k : kids) CHECK(is_simple_st_path(g, k));
}

TEST_CASE("a one-member population with no generations is the seed path") {
  const auto g = detour_graph();
  QueryCounter counter;
  const SkrEstimator estimator(params_with(0.96, 10.0), 300, 5, &counter);
  GaConfig cfg;
  cfg.population = 1;
  cfg.generations = 0;
  const auto r = genetic_algorithm(g, 0, 1, estimator, cfg);
  CHECK(r.best.route.nodes == std::vector<int>{0, 1});
  CHECK(r.best.queries == 1);
  REQUIRE(r.generation_best.size() == 1);
  CHECK(r.generation_best[0] == r.best.skr_hz);
}

TEST_CASE("every individual is evaluated exactly once") {
  const auto g = detour_graph();
  QueryCounter counter;
  const SkrEstimator estimator(params_with(0.96, 10.0), 300, 5, &counter);
  GaConfig cfg;
  cfg.population = 5;
  cfg.generations = 3;
  cfg.seed = 21;
  const auto r = genetic_algorithm(g, 0, 1, estimator, cfg);
  CHECK(r.best.queries == 20);  // 5 individuals x (3 generations + seed pool)
  CHECK(counter.count() == 20);
  CHECK(r.generation_best.size() == 4);
}

TEST_CASE("the first diagnostic entry scores the seeded population") {
  const auto g = detour_graph();
  QueryCounter counter;
  const SkrEstimator estimator(params_with(0.96, 10.0), 300, 5, &counter);
  GaConfig cfg;
  cfg.population = 4;
  cfg.generations = 2;
  cfg.seed = 77;
  const auto r = genetic_algorithm(g, 0, 1, estimator, cfg);

  // The seed pool is reproducible: the minimum-length path plus streams of
  // random simple paths keyed off the config seed.
  double best0 = estimator.evaluate_route(
      PathRoute::from_nodes(g, min_length_path(g, 0, 1))).skr_hz;
  for (std::size_t i = 1; i < 4; ++i) {
    const auto nodes = random_simple_path(g, 0, 1, mix_seed(cfg.seed, i));
    best0 = std::max(best0,
                     estimator.evaluate_route(PathRoute::from_nodes(g, nodes)).skr_hz);
  }
  CHECK(r.generation_best[0] == best0);
}

TEST_CASE("evolution finds the paying detour from a direct-path seed") {
  const auto g = detour_graph();
  GaConfig cfg;
  cfg.population = 6;
  cfg.generations = 6;
  cfg.selection_theta = 0.0;  // greedy selection keeps the find
  cfg.mutation_rate = 0.3;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    QueryCounter counter;
    const SkrEstimator estimator(params_with(0.96, 10.0), 300, 5, &counter);
    cfg.seed = seed;
    const auto r = genetic_algorithm(g, 0, 1, estimator, cfg);
    if (r.best.route.nodes == std::vector<int>{0, 2, 1}) ++hits;
  }
  CHECK(hits >= 90);
}

TEST_CASE("identical configs reproduce identical runs") {
  GraphGenConfig gen;
  gen.n_repeaters = 6;
  gen.seed = 3004;
  const auto g = waxman_generate(gen);
  REQUIRE(graph_distance(g, 0, 1).has_value());
  GaConfig cfg;
  cfg.population = 5;
  cfg.generations = 4;
  cfg.seed = 1234;

  QueryCounter c1, c2;
  const SkrEstimator e1(params_with(0.96, 10.0), 300, 9, &c1);
  const SkrEstimator e2(params_with(0.96, 10.0), 300, 9, &c2);
  const auto r1 = genetic_algorithm(g, 0, 1, e1, cfg);
  const auto r2 = genetic_algorithm(g, 0, 1, e2, cfg);
  CHECK(r1.best.route.nodes == r2.best.route.nodes);
  CHECK(r1.best.skr_hz == r2.best.skr_hz);
  CHECK(r1.generation_best == r2.generation_best);
}

TEST_CASE("evolved routes are always valid simple paths") {
  GraphGenConfig gen;
  gen.n_repeaters = 7;
  int tested = 0;
  for (std::uint64_t seed = 0; tested < 8 && seed < 100; ++seed) {
    gen.seed = 4000 + seed;
    const auto g = waxman_generate(gen);
    if (!graph_distance(g, 0, 1).has_value()) continue;
    ++tested;
    QueryCounter counter;
    const SkrEstimator estimator(params_with(0.96, 10.0), 300, seed, &counter);
    GaConfig cfg;
    cfg.population = 6;
    cfg.generations = 4;
    cfg.seed = seed + 5;
    const auto r = genetic_algorithm(g, 0, 1, estimator, cfg);
    CHECK(is_simple_st_path(g, r.best.route));
  }
  CHECK(tested == 8);
}

TEST_CASE("evolution rejects malformed configs") {
  const auto g = detour_graph();
  QueryCounter counter;
  const SkrEstimator estimator(params_with(0.96, 10.0), 100, 1, &counter);
  GaConfig cfg;
  cfg.population = 0;
  CHECK_THROWS_AS(genetic_algorithm(g, 0, 1, estimator, cfg),
                  std::invalid_argument);
  cfg = GaConfig{};
  cfg.generations = -1;
  CHECK_THROWS_AS(genetic_algorithm(g, 0, 1, estimator, cfg),
                  std::invalid_argument);
  cfg = GaConfig{};
  cfg.mutation_rate = 1.5;
  CHECK_THROWS_AS(genetic_algorithm(g, 0, 1, estimator, cfg),
                  std::invalid_argument);
  cfg = GaConfig{};
  cfg.selection_theta = -0.1;
  CHECK_THROWS_AS(genetic_algorithm(g, 0, 1, estimator, cfg),
                  std::invalid_argument);
}

}  // TEST_SUITE
