#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "qroute/netgraph.hpp"
#include "qroute/rng.hpp"

namespace qroute {

/**
 * Physical model parameters for a repeater chain. The coherence time may be
 * +infinity, which disables memory dephasing entirely.
 */
struct PhysicalParams {
  double fidelity = 0.96;             // initial Werner fidelity F, in (0.25, 1]
  double coherence_time_s = 10.0;     // memory coherence time T, > 0 or +inf
  double attenuation_db_per_km = 0.2; // fiber loss
  double signal_speed_km_s = 200000.0;

  void validate() const;  // throws std::invalid_argument on bad values
};

/**
 * A chain to evaluate: per-link lengths plus one flag per intermediate node
 * marking whether that node's memory is treated as noiseless. An empty flag
 * vector means every intermediate memory is noisy. End nodes never dwell in
 * memory, so there is no flag for them.
 */
struct ChainSpec {
  std::vector<double> lengths_km;
  std::vector<bool> perfect_memory;
};

struct SkrEstimate {
  double skr_hz = 0.0;
  double stderr_hz = 0.0;        // delta-method standard error of skr_hz
  std::uint64_t n_samples = 0;
  double total_sim_time_s = 0.0; // summed simulated delivery time
};

/// Transmission success probability of one attempt over `length_km` of fiber.
double attenuation_success_prob(double length_km, double db_per_km);

/// Duration of one synchronized entanglement attempt across the chain.
double attempt_duration_s(double max_length_km, double speed_km_s);

/// Werner parameter of a freshly generated pair with fidelity F in (0.25, 1].
double initial_werner(double fidelity);

/// Binary entropy h(q) in bits; h(0) = h(1) = 0.
double binary_entropy(double q);

/// The QBER at which the key fraction hits zero: unique root of h(Q) = 1/2
/// on (0, 0.5), located by bisection. Cached after the first call.
double qber_threshold();

/// Werner parameter below which no key can be distilled: 1 - 2 * qber_threshold().
double werner_threshold();

/// Secret-key fraction of a Werner state with parameter w in [0, 1]:
/// max(0, 1 - 2 h((1 - w)/2)). Exactly zero at or below werner_threshold().
double skf_from_werner(double w);

/**
 * Number of links at which a noiseless-memory chain's key rate hits zero:
 * log(werner_threshold) / log(initial_werner(F)). Any chain with at least
 * this many links has SKR exactly 0 regardless of geometry. Throws
 * std::domain_error for F = 1 (no finite cutoff) or F outside (0.25, 1].
 */
double max_links(double fidelity);

/// Geometric attempt count: X >= 1 with P(X = k) = p (1-p)^(k-1), sampled by
/// inversion from one uniform draw. p = 1 always yields 1.
std::int64_t sample_geometric(double p, SplitMix64& rng);

/**
 * Monte-Carlo secret-key-rate estimate for a chain: mean per-sample secret-key
 * fraction divided by mean delivery time. Sample j draws its randomness from
 * a stream seeded by (seed, j), so the result is bit-identical however the
 * samples are scheduled.
 */
SkrEstimate simulate_skr(const ChainSpec& chain, const PhysicalParams& params,
                         std::uint64_t n_samples, std::uint64_t seed);

/// Thread-safe counter of estimator calls; the cost metric all searches share.
class QueryCounter {
 public:
  void add(std::uint64_t n = 1) { count_.fetch_add(n, std::memory_order_relaxed); }
  std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
  void reset() { count_.store(0, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};

/// Seed derived from the run seed and the chain's content (lengths + flags),
/// so the same chain always gets the same Monte-Carlo draw within a run.
std::uint64_t chain_content_seed(std::uint64_t run_seed, const ChainSpec& chain);

/**
 * The costed SKR oracle every search calls. Each evaluation is seeded from
 * (run_seed, chain content): re-evaluating an identical chain returns an
 * identical estimate, and every evaluation bumps the query counter by one.
 */
class SkrEstimator {
 public:
  SkrEstimator(PhysicalParams params, std::uint64_t n_samples,
               std::uint64_t run_seed, QueryCounter* counter = nullptr)
      : params_(params), n_samples_(n_samples), run_seed_(run_seed), counter_(counter) {
    params_.validate();
  }

  SkrEstimate evaluate(const ChainSpec& chain) const;

  /// Evaluates a route as a standalone chain with every memory noisy.
  SkrEstimate evaluate_route(const PathRoute& route) const;

  const PhysicalParams& params() const { return params_; }
  std::uint64_t n_samples() const { return n_samples_; }
  std::uint64_t run_seed() const { return run_seed_; }
  QueryCounter* counter() const { return counter_; }
  std::uint64_t queries() const { return counter_ ? counter_->count() : 0; }

 private:
  PhysicalParams params_;
  std::uint64_t n_samples_;
  std::uint64_t run_seed_;
  QueryCounter* counter_;
};

}  // namespace qroute
