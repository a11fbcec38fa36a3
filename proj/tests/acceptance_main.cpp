// Acceptance suite: end-to-end checks of the routing engine against its
// analytic oracles and published behavior, one [PASS]/[FAIL] line each.
// Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qroute/bench.hpp"
#include "qroute/befs.hpp"
#include "qroute/metaheuristics.hpp"
#include "qroute/netgraph.hpp"
#include "qroute/rng.hpp"
#include "qroute/skr_model.hpp"
#include "test_helpers.hpp"

using namespace qroute;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

PhysicalParams params_with(double fidelity, double coherence) {
  PhysicalParams p;
  p.fidelity = fidelity;
  p.coherence_time_s = coherence;
  return p;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct PairedStats {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

/// Mean and standard error of a vector of paired differences.
PairedStats paired(const std::vector<double>& d) {
  PairedStats s;
  const auto n = static_cast<double>(d.size());
  for (double x : d) s.mean += x;
  s.mean /= n;
  double ss = 0.0;
  for (double x : d) ss += (x - s.mean) * (x - s.mean);
  s.stderr_mean = std::sqrt(ss / (n - 1.0) / n);
  return s;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

/// A suite-style instance: generated, pruned, and oriented the same way the
/// benchmark runner prepares graphs.
struct Prepared {
  NetworkGraph graph;
  int s = 0;
  int t = 1;
  std::uint64_t eval_seed = 0;
};

Prepared prepare(int n_repeaters, int index, std::uint64_t master) {
  const GraphGenConfig tmpl;
  auto [raw, graph_seed] = suite_graph(tmpl, n_repeaters, index, master);
  const auto [s0, t0] = raw.end_nodes();
  NetworkGraph g = prune_to_st_biconnected(raw, s0, t0);
  const auto [ds, dt] = choose_direction(g, s0, t0, DirectionHeuristic::Median);
  return {std::move(g), ds, dt, mix_seed(graph_seed, 0x65706172ull)};
}

// ---------------------------------------------------------------------------

Outcome analytic_single_link() {
  const auto params = params_with(1.0, kInf);
  const ChainSpec chain{{50.0}, {}};
  const auto start = std::chrono::steady_clock::now();
  const auto est = simulate_skr(chain, params, 10000, 1);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  // Closed form p * c / L: p = 10^(-0.2*50/10) = 0.1, c/L = 4000 attempts/s.
  const double expected = 0.1 * 200000.0 / 50.0;
  const bool in_band = std::abs(est.skr_hz - expected) <= 0.04 * expected;
  const bool fast = secs < 1.0;
  return {in_band && fast,
          fmt(est.skr_hz, 6) + " Hz vs " + fmt(expected) + " Hz +/- 4%, " +
              fmt(secs, 2) + " s"};
}

Outcome analytic_two_link() {
  const auto params = params_with(1.0, kInf);
  const ChainSpec chain{{25.0, 25.0}, {}};
  const auto est = simulate_skr(chain, params, 10000, 2);
  // E[max(X1, X2)] = 2/p - 1/(2p - p^2) for iid geometric attempt counts.
  const double p = attenuation_success_prob(25.0, 0.2);
  const double e_max = 2.0 / p - 1.0 / (2.0 * p - p * p);
  const double expected = 1.0 / (e_max * attempt_duration_s(25.0, 200000.0));
  const bool in_band = std::abs(est.skr_hz - expected) <= 0.04 * expected;
  return {in_band, fmt(est.skr_hz, 6) + " Hz vs " + fmt(expected, 6) +
                       " Hz +/- 4%"};
}

Outcome hard_zero_past_cutoff() {
  const std::vector<std::vector<double>> chains{
      {10, 20, 30}, {50, 50, 50}, {5, 80, 15}, {33, 33, 34}, {1, 1, 1}};
  bool all_zero = true;
  for (const auto& lengths : chains) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      for (double coherence : {10.0, kInf}) {
        const auto est = simulate_skr({lengths, {}},
                                      params_with(0.94, coherence), 2000, seed);
        all_zero = all_zero && est.skr_hz == 0.0;
      }
    }
  }
  const double cut94 = max_links(0.94);
  const double cut96 = max_links(0.96);
  const bool cuts_ok =
      cut94 > 2.97 && cut94 < 2.99 && cut96 > 4.52 && cut96 < 4.55;
  return {all_zero && cuts_ok,
          std::string("3-link rates at F=0.94 ") +
              (all_zero ? "all exactly 0" : "NOT all zero") +
              "; cutoffs " + fmt(cut94) + ", " + fmt(cut96)};
}

Outcome qber_threshold_value() {
  const double q = qber_threshold();
  return {q >= 0.110027 && q <= 0.110029, "Q* = " + fmt(q, 8)};
}

Outcome oracle_equivalence() {
  const std::uint64_t master = 501;
  const std::uint64_t n_samples = 2000;
  const auto params = params_with(0.96, 10.0);
  int n = 0, exact_ok = 0, heuristic_ok = 0;
  for (int size : {5, 6, 7, 8}) {
    for (int index = 0; index < 25; ++index) {
      const auto inst = prepare(size, index, master);
      const auto run = [&](const char* name) {
        return run_algorithm(inst.graph, inst.s, inst.t,
                             AlgorithmSpec{name, {}, {}}, params, n_samples,
                             inst.eval_seed);
      };
      const auto reference = run("enumeration");
      const auto exact = run("befs-exact");
      const auto heuristic = run("befs-heuristic");
      ++n;
      const auto matches = [&](const SearchResult& r) {
        return std::abs(r.skr_hz - reference.skr_hz) <=
               3.0 * std::hypot(r.stderr_hz, reference.stderr_hz);
      };
      if (matches(exact)) ++exact_ok;
      if (matches(heuristic)) ++heuristic_ok;
    }
  }
  const bool pass = exact_ok == n && heuristic_ok * 100 >= 98 * n;
  return {pass, "exact matched " + std::to_string(exact_ok) + "/" +
                    std::to_string(n) + ", bounded heuristic " +
                    std::to_string(heuristic_ok) + "/" + std::to_string(n)};
}

Outcome non_isotonicity_witness() {
  IsotonicityScanConfig cfg;
  cfg.n_graphs = 100;
  cfg.n_repeaters = 8;
  cfg.params = params_with(0.94, 10.0);
  cfg.n_samples = 1000;
  cfg.master_seed = 601;
  cfg.fidelity_grid = {0.94};
  cfg.coherence_grid = {10.0};
  cfg.grid_graphs = 100;
  cfg.grid_repeaters = 25;
  const auto report = isotonicity_scan(cfg);

  const bool found = !report.witnesses.empty();
  bool settled_lags = false;
  std::string grid_note = "no grid cell";
  if (report.grid.size() == 1) {
    const auto& cell = report.grid[0];
    settled_lags = cell.mean_inefficiency >
                   3.0 * cell.stderr_inefficiency;
    grid_note = "settling inefficiency " + fmt(cell.mean_inefficiency) +
                " +/- " + fmt(cell.stderr_inefficiency) + " over " +
                std::to_string(cell.n_graphs) + " graphs";
  }
  return {found && settled_lags,
          std::to_string(report.witnesses.size()) +
              " significant witnesses in 100 graphs; " + grid_note};
}

Outcome query_count_ordering() {
  const auto params = params_with(0.96, 10.0);
  const std::uint64_t n_samples = 300;

  std::vector<double> q_util, q_exact, q_heur;
  for (int index = 0; index < 100; ++index) {
    const auto inst = prepare(25, index, 701);
    const auto run = [&](const char* name) {
      return static_cast<double>(
          run_algorithm(inst.graph, inst.s, inst.t, AlgorithmSpec{name, {}, {}},
                        params, n_samples, inst.eval_seed)
              .queries);
    };
    q_heur.push_back(run("befs-heuristic"));
    q_exact.push_back(run("befs-exact"));
    q_util.push_back(run("befs-utility"));
  }
  const double med_heur = median(q_heur);
  const double med_exact = median(q_exact);
  const double med_util = median(q_util);

  // Enumeration runs only on small instances; its median query count grows
  // super-linearly, so fit ln(median) against size and extrapolate.
  std::vector<double> sizes, lnq;
  for (int size : {4, 5, 6, 7, 8, 9}) {
    std::vector<double> qs;
    for (int index = 0; index < 12; ++index) {
      const auto inst = prepare(size, index, 702);
      qs.push_back(static_cast<double>(
          run_algorithm(inst.graph, inst.s, inst.t,
                        AlgorithmSpec{"enumeration", {}, {}}, params, n_samples,
                        inst.eval_seed)
              .queries));
    }
    sizes.push_back(size);
    lnq.push_back(std::log(median(qs)));
  }
  const auto k = static_cast<double>(sizes.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    sx += sizes[i];
    sy += lnq[i];
    sxx += sizes[i] * sizes[i];
    sxy += sizes[i] * lnq[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / k;
  const double enum_at_25 = std::exp(intercept + slope * 25.0);

  // Complete graph on two end nodes and three repeaters: 16 distinct paths.
  std::vector<std::pair<double, double>> coords{
      {0, 0}, {40, 0}, {10, 10}, {20, -10}, {30, 10}};
  std::vector<std::tuple<int, int, double>> edges;
  for (int u = 0; u < 5; ++u) {
    for (int v = u + 1; v < 5; ++v) edges.emplace_back(u, v, 10.0 + u + v);
  }
  const auto k5 = qroute_test::make_graph(coords, edges);
  QueryCounter counter;
  const SkrEstimator estimator(params, 200, 3, &counter);
  std::uint64_t path_count = 0;
  enumerate_best(k5, 0, 1, estimator, &path_count);

  const bool ordered = med_heur < med_exact && med_exact < med_util &&
                       med_util < enum_at_25;
  return {ordered && path_count == 16 && slope > 0.0,
          "median queries " + fmt(med_heur) + " < " + fmt(med_exact) + " < " +
              fmt(med_util) + " < ~" + fmt(enum_at_25, 3) +
              " (extrapolated); complete-graph paths " +
              std::to_string(path_count)};
}

Outcome prefix_bounding_soundness() {
  const auto params = params_with(0.96, 10.0);
  const std::uint64_t n_samples = 2000;
  int n = 0, skr_ok = 0, queries_ok = 0;
  for (int size : {3, 4, 5, 6}) {
    for (int index = 0; index < 25; ++index) {
      const auto inst = prepare(size, index, 801);
      for (auto kind : {MeritKind::ExactBound, MeritKind::HeuristicBound}) {
        QueryCounter c1, c2;
        const SkrEstimator plain_est(params, n_samples, inst.eval_seed, &c1);
        const SkrEstimator bounded_est(params, n_samples, inst.eval_seed, &c2);
        const auto plain =
            befs_search(inst.graph, inst.s, inst.t, plain_est, kind, false);
        const auto bounded =
            befs_search(inst.graph, inst.s, inst.t, bounded_est, kind, true);
        ++n;
        if (std::abs(bounded.skr_hz - plain.skr_hz) <=
            3.0 * std::hypot(bounded.stderr_hz, plain.stderr_hz)) {
          ++skr_ok;
        }
        if (bounded.queries <= plain.queries) ++queries_ok;
      }
    }
  }
  return {skr_ok == n && queries_ok == n,
          "same rate " + std::to_string(skr_ok) + "/" + std::to_string(n) +
              ", no extra queries " + std::to_string(queries_ok) + "/" +
              std::to_string(n)};
}

Outcome stochastic_dominance_properties() {
  // CDF of the chain's attempt count: F(k) = prod_i (1 - (1-p_i)^k).
  // Splitting a fixed total length is the same as splitting a fixed product
  // of link success probabilities (attenuation is exponential in length), so
  // the splits are expressed through dyadic probabilities: every p, 1-p, and
  // product below is an exact double, which keeps the k = 1 tie -- where all
  // equal-product splits have identical F -- bitwise instead of 1 ulp apart.
  const auto cdf = [](const std::vector<double>& probs, int k) {
    double f = 1.0;
    for (double p : probs) {
      f *= 1.0 - std::pow(1.0 - p, k);
    }
    return f;
  };
  const auto dominates_everywhere = [&](const std::vector<double>& hom,
                                        const std::vector<double>& alt) {
    bool ge_all = true, gt_some = false;
    for (int k = 1; k <= 200; ++k) {
      const double fh = cdf(hom, k);
      const double fa = cdf(alt, k);
      if (fh < fa) ge_all = false;
      if (fh > fa) gt_some = true;
    }
    return ge_all && gt_some;
  };

  bool splits_ok = true;
  // Two links, probability product exactly 1/16 (total ~60.2 km at 0.2 dB/km).
  const std::vector<std::vector<double>> two_link{
      {0.5, 0.125}, {0.125, 0.5}, {0.0625, 1.0}, {1.0, 0.0625}};
  for (const auto& alt : two_link) {
    splits_ok = splits_ok && dominates_everywhere({0.25, 0.25}, alt);
  }
  // Three links, probability product exactly 1/64 (total ~90.3 km).
  const std::vector<std::vector<double>> three_link{
      {0.5, 0.25, 0.125},  {0.125, 0.25, 0.5},  {0.5, 0.5, 0.0625},
      {0.0625, 0.5, 0.5},  {0.125, 0.125, 1.0}, {1.0, 0.0625, 0.25}};
  for (const auto& alt : three_link) {
    splits_ok = splits_ok && dominates_everywhere({0.25, 0.25, 0.25}, alt);
  }

  // The production domination checker against the exhaustive matcher.
  SplitMix64 rng(909);
  int agree = 0;
  const int cases = 100000;
  for (int i = 0; i < cases; ++i) {
    std::vector<double> p(rng.below(6)), q(rng.below(6));
    for (auto& x : p) x = static_cast<double>(1 + rng.below(8));
    for (auto& x : q) x = static_cast<double>(1 + rng.below(8));
    if (dominates(p, q) == qroute_test::injection_exists(p, q)) ++agree;
  }
  return {splits_ok && agree == cases,
          std::string("homogeneous splits dominate: ") +
              (splits_ok ? "yes" : "no") + "; checker agreement " +
              std::to_string(agree) + "/" + std::to_string(cases)};
}

Outcome metaheuristic_budget_monotonicity() {
  const auto params = params_with(0.96, 10.0);
  const std::uint64_t n_samples = 300;

  // Both annealing arms share an exponential schedule: it holds the fraction
  // of hot steps constant, so a larger budget adds refinement instead of a
  // longer random walk off the viable-path region. The linear default keeps
  // the walk above the ~2-7 Hz rate scale of these instances for half the
  // run, which buries the budget effect in walk variance.
  const auto schedule = CoolingSchedule::exponential(2.0, 0.01);
  AlgorithmSpec sa_small{"annealing", {}, {}};
  sa_small.sa.n_steps = 100;
  sa_small.sa.schedule = schedule;
  AlgorithmSpec sa_large{"annealing", {}, {}};
  sa_large.sa.n_steps = 500;
  sa_large.sa.schedule = schedule;
  AlgorithmSpec ga_small{"genetic", {}, {}};
  ga_small.ga.generations = 10;
  AlgorithmSpec ga_large{"genetic", {}, {}};
  ga_large.ga.generations = 50;
  const AlgorithmSpec reference{"befs-heuristic", {}, {}};

  std::vector<double> d_sa, d_ga;
  for (int index = 0; index < 100; ++index) {
    const auto inst = prepare(50, index, 1001);
    const auto run = [&](const AlgorithmSpec& spec) {
      return run_algorithm(inst.graph, inst.s, inst.t, spec, params, n_samples,
                           inst.eval_seed)
          .skr_hz;
    };
    const std::vector<double> skrs{run(sa_small), run(sa_large), run(ga_small),
                                   run(ga_large), run(reference)};
    const auto ineff = relative_inefficiency(skrs);
    d_sa.push_back(ineff[0] - ineff[1]);  // positive when 500 steps beat 100
    d_ga.push_back(ineff[2] - ineff[3]);  // positive when 50 gens beat 10
  }
  const auto sa = paired(d_sa);
  const auto ga = paired(d_ga);
  const bool pass = sa.mean > 2.0 * sa.stderr_mean &&
                    ga.mean > 2.0 * ga.stderr_mean;
  return {pass, "annealing gap " + fmt(sa.mean) + " +/- " +
                    fmt(sa.stderr_mean) + ", genetic gap " + fmt(ga.mean) +
                    " +/- " + fmt(ga.stderr_mean) + " (paired, need > 2 sigma)"};
}

Outcome byte_identical_reruns() {
  SuiteConfig cfg;
  cfg.repeater_counts = {4, 6};
  cfg.graphs_per_count = 3;
  cfg.params = params_with(0.96, 10.0);
  cfg.n_samples = 300;
  cfg.master_seed = 1101;
  cfg.record_wall_time = false;
  AlgorithmSpec annealing{"annealing", {}, {}};
  annealing.sa.n_steps = 50;
  AlgorithmSpec genetic{"genetic", {}, {}};
  genetic.ga.population = 6;
  genetic.ga.generations = 4;
  cfg.algorithms = {AlgorithmSpec{"enumeration", {}, {}},
                    AlgorithmSpec{"befs-heuristic", {}, {}}, annealing, genetic};

  cfg.workers = 1;
  const auto first = records_to_csv(run_suite(cfg));
  const auto rerun = records_to_csv(run_suite(cfg));
  cfg.workers = 2;
  const auto two = records_to_csv(run_suite(cfg));
  cfg.workers = 4;
  const auto four = records_to_csv(run_suite(cfg));
  const bool pass = first == rerun && first == two && first == four;
  return {pass, pass ? "identical CSV at 1, 2, and 4 workers"
                     : "worker count or re-run changed the CSV bytes"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"analytic single-link rate", analytic_single_link},
      {"analytic two-link rate", analytic_two_link},
      {"hard zero past the link cutoff", hard_zero_past_cutoff},
      {"QBER threshold value", qber_threshold_value},
      {"search matches enumeration on small graphs", oracle_equivalence},
      {"non-isotonicity witness and settling penalty", non_isotonicity_witness},
      {"query-count ordering at desk scale", query_count_ordering},
      {"prefix bounding soundness", prefix_bounding_soundness},
      {"stochastic dominance properties", stochastic_dominance_properties},
      {"metaheuristic budget monotonicity", metaheuristic_budget_monotonicity},
      {"byte-identical suite re-runs", byte_identical_reruns},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ". "
              << criteria[i].first << ": " << outcome.detail << " ("
              << fmt(secs, 3) << " s)" << std::endl;
  }
  if (failures) {
    std::cout << failures << " of " << criteria.size() << " criteria failed"
              << std::endl;
  } else {
    std::cout << "all " << criteria.size() << " criteria passed" << std::endl;
  }
  return failures ? 1 : 0;
}
