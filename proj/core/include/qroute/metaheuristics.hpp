#pragma once

#include <cstdint>
#include <vector>

#include "qroute/befs.hpp"
#include "qroute/netgraph.hpp"
#include "qroute/skr_model.hpp"

namespace qroute {

/**
 * Annealing temperature schedule. Linear cools from theta0 to 0 across the
 * run; Exponential decays from theta0 to theta_final. A zero temperature
 * means greedy acceptance (only non-worsening moves).
 */
struct CoolingSchedule {
  enum class Kind { Linear, Exponential };
  Kind kind = Kind::Linear;
  double theta0 = 2.0;
  double theta_final = 0.01;

  static CoolingSchedule linear(double t0) { return {Kind::Linear, t0, 0.0}; }
  static CoolingSchedule exponential(double t0, double tf) {
    return {Kind::Exponential, t0, tf};
  }

  /// Temperature at step i of n (i in [1, n]).
  double temperature(int step, int n_steps) const;
  void validate() const;
};

struct SaConfig {
  int n_steps = 500;
  double length_penalty = 2.0;  // per-edge penalty for zero-rate paths
  CoolingSchedule schedule = CoolingSchedule::linear(2.0);
  std::uint64_t seed = 0;
};

struct GaConfig {
  int population = 25;
  int generations = 20;
  double selection_theta = 0.5;  // softmax temperature; 0 = argmax
  double mutation_rate = 0.75;
  std::uint64_t seed = 0;
};

/**
 * All single-step neighbors of a path: insert one repeater between a
 * consecutive pair (both connecting edges must exist), or splice one interior
 * node out (the bypassing edge must exist). Returned as a deduplicated,
 * deterministically ordered set of simple s-t paths.
 */
std::vector<PathRoute> enumerate_mutations(const NetworkGraph& g, const PathRoute& p);

/// Uniform draw from enumerate_mutations; returns p unchanged when the path
/// has no mutations.
PathRoute random_mutation(const NetworkGraph& g, const PathRoute& p, SplitMix64& rng);

/// SKR if positive, else -length_penalty * edge_count: steers the annealer
/// off the zero-rate plateau toward shorter paths. One estimator call.
double penalized_skr(const PathRoute& p, const SkrEstimator& estimator,
                     double length_penalty);

struct SaResult {
  SearchResult final_path;  // state after the last step; the reported answer
  SearchResult best_seen;   // best state visited anywhere along the walk
};

/**
 * Simulated annealing over simple s-t paths, starting from the
 * minimum-total-length path. Each step mutates the current path, evaluates
 * the mutant (the current path's value is cached), and accepts with
 * probability min(1, exp(delta / theta_i)); at theta = 0 exactly the
 * non-worsening moves are accepted.
 */
SaResult simulated_annealing(const NetworkGraph& g, int s, int t,
                             const SkrEstimator& estimator, const SaConfig& config);

/**
 * Softmax parent choice over cached population SKRs: probability
 * proportional to exp(skr / theta), computed max-shifted for stability.
 * theta = 0 degenerates to a uniform choice among the argmax set.
 */
std::size_t select_parent(const std::vector<double>& skrs, double theta,
                          SplitMix64& rng);

/**
 * All crossover children of two parent paths: for every node a of p1 and
 * node b of p2 with an (a, b) edge in the graph, concatenate p1's prefix up
 * to a with p2's suffix from b, then cut loops between duplicate node
 * occurrences until the result is simple. Cuts at the end nodes are allowed
 * and collapse to one of the parents. Deduplicated, deterministic order.
 */
std::vector<PathRoute> enumerate_recombinations(const NetworkGraph& g,
                                                const PathRoute& p1,
                                                const PathRoute& p2);

struct GaResult {
  SearchResult best;                    // argmax over the final population
  std::vector<double> generation_best;  // per-generation population max, diagnostic
};

/**
 * Generational genetic algorithm: population seeded with the minimum-length
 * path plus random simple paths, children built by recombination of
 * softmax-selected parents (falling back to a copy of the first parent when
 * no recombination exists) followed by mutation with the configured rate.
 * Each individual is evaluated once when created.
 */
GaResult genetic_algorithm(const NetworkGraph& g, int s, int t,
                           const SkrEstimator& estimator, const GaConfig& config);

}  // namespace qroute
