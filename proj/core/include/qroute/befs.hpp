#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "qroute/netgraph.hpp"
#include "qroute/skr_model.hpp"

namespace qroute {

struct SearchResult {
  PathRoute route;
  double skr_hz = 0.0;
  double stderr_hz = 0.0;
  std::uint64_t queries = 0;  // estimator calls made by this search
};

/// One-edge extensions of a path prefix that stay simple, ordered by
/// ascending next-node id.
std::vector<PathRoute> expand(const NetworkGraph& g, const PathRoute& p);

/**
 * Peak value of a unimodal function over positive integers: exponential
 * expansion from (1, 2, 4) followed by bisection of the larger flank until
 * the bracket is three consecutive integers. Evaluations are memoized, so
 * bound_fn is called at most once per argument.
 */
double unimodal_peak_search(const std::function<double(int)>& bound_fn);

enum class MeritKind {
  Utility,         // prefix scored as a standalone chain
  ExactBound,      // max over suffix link counts, noiseless suffix memories
  HeuristicBound,  // peak-searched suffix bound with noisy memories
};

/**
 * Scores path prefixes for best-first search. The root prefix (just the
 * source) scores +infinity; a full path (ending at the target) scores its
 * plain utility; other prefixes score according to the merit kind. Bound
 * merits need the fidelity cutoff, so they reject F = 1.
 */
class MeritEvaluator {
 public:
  MeritEvaluator(MeritKind kind, const NetworkGraph& g, int target,
                 const SkrEstimator& estimator);

  struct Value {
    double merit = 0.0;
    double stderr_hz = 0.0;  // meaningful only when the score is a utility
  };

  Value operator()(const PathRoute& p);

  MeritKind kind() const { return kind_; }
  double distance_to_target(int node) const {
    return dist_to_target_[static_cast<std::size_t>(node)];
  }

 private:
  double exact_bound(const PathRoute& p);
  double heuristic_bound(const PathRoute& p);

  MeritKind kind_;
  const NetworkGraph* g_;
  int target_;
  const SkrEstimator* estimator_;
  std::vector<double> dist_to_target_;
  double links_cutoff_ = std::numeric_limits<double>::infinity();
};

/// Convenience single-shot merit calls (used by tests and small tools).
double merit_utility(const PathRoute& p, const SkrEstimator& estimator);
double merit_exact(const PathRoute& p, const NetworkGraph& g, int target,
                   const SkrEstimator& estimator);
double merit_heuristic(const PathRoute& p, const NetworkGraph& g, int target,
                       const SkrEstimator& estimator);

/**
 * Order-preserving injection test on length tuples: true iff every length of
 * p can be matched, in order, to a distinct not-earlier length of q that is
 * at least as large (greedy two-pointer scan; equal tuples match trivially).
 * When it holds, q's completions can never beat p's.
 */
bool dominates(const std::vector<double>& p, const std::vector<double>& q);

/**
 * Domination between prefixes for deferred merit evaluation: p dominates q
 * iff dominates(lengths) holds and p's end is no farther from the target.
 * Mutual domination (identical tuples, equal distances) is broken by node-id
 * sequence order so exactly one direction wins.
 */
bool merit_dominates(const PathRoute& p, const PathRoute& q, double dist_p,
                     double dist_q);
bool merit_dominates(const NetworkGraph& g, int target, const PathRoute& p,
                     const PathRoute& q);

/**
 * Best-first search over path prefixes ordered by merit (ties: fewer edges,
 * then lexicographic node ids). With prefix_bounded, newly expanded prefixes
 * enter a domination poset and only poset-maximal ones get their merit
 * evaluated; dominated prefixes wait until their dominators leave the queue.
 * Returns the first full path popped. Throws NoPathError when the queue
 * drains, std::invalid_argument for s == t.
 */
SearchResult befs_search(const NetworkGraph& g, int s, int t,
                         const SkrEstimator& estimator, MeritKind kind,
                         bool prefix_bounded);

/**
 * Dijkstra-style node settling keyed by prefix utility: keeps one best-known
 * prefix per node, settles the highest-utility node, and relaxes each
 * neighbor by evaluating prefix-plus-edge (one query per relaxation).
 * Correct only when the utility is isotonic; used as the baseline that
 * demonstrates where that assumption breaks.
 */
SearchResult extended_dijkstra(const NetworkGraph& g, int s, int t,
                               const SkrEstimator& estimator);

/**
 * Exhaustive enumeration of all simple s-t paths, evaluating each one.
 * Ties on SKR break toward fewer edges, then lexicographic node ids. If
 * path_count_out is given it receives the number of paths enumerated.
 */
SearchResult enumerate_best(const NetworkGraph& g, int s, int t,
                            const SkrEstimator& estimator,
                            std::uint64_t* path_count_out = nullptr);

}  // namespace qroute
