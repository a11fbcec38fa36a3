#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qroute/befs.hpp"
#include "qroute/metaheuristics.hpp"
#include "qroute/netgraph.hpp"
#include "qroute/skr_model.hpp"

namespace qroute {

/// Algorithm ids accepted by the suite runner and the CLI.
inline constexpr const char* kAlgorithmNames[] = {
    "enumeration",  "dijkstra",       "befs-utility", "befs-exact",
    "befs-heuristic", "annealing",    "genetic",
};

struct AlgorithmSpec {
  std::string name;  // one of kAlgorithmNames
  SaConfig sa;       // used when name == "annealing" (seed overridden per run)
  GaConfig ga;       // used when name == "genetic" (seed overridden per run)
};

struct BenchmarkRecord {
  int graph_id = 0;
  int n_repeaters = 0;
  std::string algorithm;
  double skr_hz = 0.0;  // NaN on a failed run
  std::uint64_t query_count = 0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;       // evaluation seed shared by one graph's runs
  std::vector<int> route;       // empty on a failed run
};

struct SuiteConfig {
  std::vector<int> repeater_counts;
  int graphs_per_count = 10;
  GraphGenConfig graph_template;  // seed field ignored; per-graph seeds derived
  PhysicalParams params;
  std::uint64_t n_samples = 10000;
  std::uint64_t master_seed = 0;
  bool prune = true;
  DirectionHeuristic direction = DirectionHeuristic::Median;
  std::vector<AlgorithmSpec> algorithms;
  int workers = 1;               // 0 = hardware concurrency
  bool record_wall_time = true;  // false writes 0 ms, for byte-stable output
  int max_generation_attempts = 64;  // redraws until s and t are connected
};

/**
 * Generates the graph for (repeater count, index) under a suite's master
 * seed: draws Waxman instances deterministically until s and t are connected
 * (up to max_attempts), so every worker assembles the identical graph.
 * Returns the graph and the seed that produced it.
 */
std::pair<NetworkGraph, std::uint64_t> suite_graph(const GraphGenConfig& tmpl,
                                                   int n_repeaters, int index,
                                                   std::uint64_t master_seed,
                                                   int max_attempts = 64);

/**
 * Runs every configured algorithm on every generated graph. Graph seeds,
 * evaluation seeds, and algorithm seeds all derive from the master seed, and
 * records are sorted by (graph_id, algorithm) before returning, so the output
 * is identical at any worker count. A failed run yields an error record
 * (NaN rate, empty route) rather than aborting the suite.
 */
std::vector<BenchmarkRecord> run_suite(const SuiteConfig& config);

/// Runs one named algorithm on a prepared graph with a fixed evaluation seed.
SearchResult run_algorithm(const NetworkGraph& g, int s, int t,
                           const AlgorithmSpec& algo, const PhysicalParams& params,
                           std::uint64_t n_samples, std::uint64_t eval_seed);

/**
 * Per-algorithm (best - skr) / best across one graph's records, where best is
 * the maximum rate among them. If every rate is zero (or no record is usable)
 * every inefficiency is zero. Error records are ignored for the baseline and
 * get NaN.
 */
std::map<std::string, double> relative_inefficiency(
    const std::vector<BenchmarkRecord>& graph_records);

/// Inefficiency of each entry against the max of `skrs`; all-zero input maps
/// to all-zero output.
std::vector<double> relative_inefficiency(const std::vector<double>& skrs);

/// CSV with header graph_id,n_repeaters,algorithm,skr_hz,query_count,
/// wall_time_ms,seed,route; route is '-'-joined node ids. Numbers are written
/// in shortest round-trip form, so parsing reproduces the records exactly.
std::string records_to_csv(const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> records_from_csv(const std::string& text);

/// Scatter of query count (log x) vs relative inefficiency per record,
/// colored by algorithm. Self-contained SVG document.
std::string svg_scatter(const std::vector<BenchmarkRecord>& records);

struct IsotonicityWitness {
  int graph_index = 0;
  std::uint64_t graph_seed = 0;
  std::vector<int> p1, p2;  // prefixes ending at the same node
  int extension = -1;       // node the shared extension edge leads to
  double skr_p1 = 0, skr_p2 = 0;    // p2 beats p1...
  double skr_p1e = 0, skr_p2e = 0;  // ...but loses once both are extended
  double sig_prefix = 0, sig_extended = 0;  // gaps in combined-sigma units
};

struct IsotonicityGridPoint {
  double fidelity = 0;
  double coherence_time_s = 0;
  int n_graphs = 0;
  double mean_inefficiency = 0;  // extended Dijkstra vs best-known
  double stderr_inefficiency = 0;
};

struct IsotonicityScanConfig {
  int n_graphs = 100;      // witness-search instances
  int n_repeaters = 8;     // witness-search graph size
  GraphGenConfig graph_template;
  PhysicalParams params;   // fidelity/coherence used for the witness search
  std::uint64_t n_samples = 10000;
  std::uint64_t master_seed = 0;
  double significance = 3.0;     // required gap in combined-sigma units
  int max_prefix_edges = 3;      // prefix enumeration depth
  int witness_budget = 400;      // estimator calls per graph
  // Optional utility-landscape grid: mean extended-Dijkstra inefficiency
  // (vs prefix-bounded heuristic search) per (fidelity, coherence) cell.
  std::vector<double> fidelity_grid;
  std::vector<double> coherence_grid;
  int grid_graphs = 0;     // 0 disables the grid
  int grid_repeaters = 25;
};

struct IsotonicityReport {
  std::vector<IsotonicityWitness> witnesses;  // first witness per graph
  std::vector<IsotonicityGridPoint> grid;
};

/**
 * Hunts for utility-ordering reversals: prefix pairs (p1, p2) ending at the
 * same node where p2 beats p1, yet after appending the same extension edge p1
 * beats p2, both gaps exceeding `significance` combined standard errors.
 * Optionally sweeps a (fidelity, coherence) grid measuring how far the
 * settling baseline falls behind best-known routing on average.
 */
IsotonicityReport isotonicity_scan(const IsotonicityScanConfig& config);

std::string grid_to_csv(const std::vector<IsotonicityGridPoint>& grid);
std::string witnesses_to_csv(const std::vector<IsotonicityWitness>& witnesses);

}  // namespace qroute
