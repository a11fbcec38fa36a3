#include "qroute/metaheuristics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qroute {

double CoolingSchedule::temperature(int step, int n_steps) const {
  if (n_steps <= 0) return 0.0;
  const double frac = static_cast<double>(step) / static_cast<double>(n_steps);
  if (kind == Kind::Linear) return theta0 * (1.0 - frac);
  return theta0 * std::pow(theta_final / theta0, frac);
}

void CoolingSchedule::validate() const {
  if (kind == Kind::Linear) {
    // theta0 == 0 is allowed: it pins the walk to greedy acceptance.
    if (!(theta0 >= 0) || !std::isfinite(theta0)) {
      throw std::invalid_argument("linear schedule needs theta0 >= 0");
    }
  } else {
    if (!(theta0 > 0) || !(theta_final > 0) || !std::isfinite(theta0) ||
        !std::isfinite(theta_final)) {
      throw std::invalid_argument("exponential schedule needs theta0, theta_final > 0");
    }
  }
}

std::vector<PathRoute> enumerate_mutations(const NetworkGraph& g, const PathRoute& p) {
  std::vector<PathRoute> out;
  const auto& seq = p.nodes;
  const int n_nodes = g.node_count();

  // Insertions: replace one edge (a, c) by a two-edge detour (a, b, c).
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const int a = seq[i];
    const int c = seq[i + 1];
    for (int b = 0; b < n_nodes; ++b) {
      if (p.contains(b)) continue;
      if (!g.has_edge(a, b) || !g.has_edge(b, c)) continue;
      std::vector<int> mutated(seq);
      mutated.insert(mutated.begin() + static_cast<std::ptrdiff_t>(i) + 1, b);
      out.push_back(PathRoute::from_nodes(g, std::move(mutated)));
    }
  }

  // Deletions: splice an interior node out when the bypassing edge exists.
  for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
    if (!g.has_edge(seq[i - 1], seq[i + 1])) continue;
    std::vector<int> mutated(seq);
    mutated.erase(mutated.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(PathRoute::from_nodes(g, std::move(mutated)));
  }

  std::sort(out.begin(), out.end(),
            [](const PathRoute& a, const PathRoute& b) { return a.nodes < b.nodes; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PathRoute random_mutation(const NetworkGraph& g, const PathRoute& p, SplitMix64& rng) {
  const auto mutations = enumerate_mutations(g, p);
  if (mutations.empty()) return p;
  return mutations[rng.below(mutations.size())];
}

double penalized_skr(const PathRoute& p, const SkrEstimator& estimator,
                     double length_penalty) {
  const double skr = estimator.evaluate_route(p).skr_hz;
  if (skr > 0.0) return skr;
  const double penalty = length_penalty * p.edge_count();
  return penalty == 0.0 ? 0.0 : -penalty;
}

namespace {

struct ScoredPath {
  PathRoute route;
  double skr = 0.0;        // raw rate
  double stderr_hz = 0.0;
  double penalized = 0.0;  // rate if positive, else -penalty * edges
};

ScoredPath score_path(PathRoute route, const SkrEstimator& estimator,
                      double length_penalty) {
  ScoredPath sp;
  const auto est = estimator.evaluate_route(route);
  sp.skr = est.skr_hz;
  sp.stderr_hz = est.stderr_hz;
  if (sp.skr > 0.0) {
    sp.penalized = sp.skr;
  } else {
    const double penalty = length_penalty * static_cast<double>(route.lengths.size());
    sp.penalized = penalty == 0.0 ? 0.0 : -penalty;
  }
  sp.route = std::move(route);
  return sp;
}

}  // namespace

SaResult simulated_annealing(const NetworkGraph& g, int s, int t,
                             const SkrEstimator& estimator, const SaConfig& config) {
  if (config.n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  if (!(config.length_penalty >= 0)) {
    throw std::invalid_argument("length_penalty must be >= 0");
  }
  config.schedule.validate();

  SplitMix64 rng(config.seed);
  const std::uint64_t q0 = estimator.queries();
  ScoredPath current = score_path(PathRoute::from_nodes(g, min_length_path(g, s, t)),
                                  estimator, config.length_penalty);
  ScoredPath best = current;

  for (int i = 1; i <= config.n_steps; ++i) {
    PathRoute mutated = random_mutation(g, current.route, rng);
    ScoredPath candidate = score_path(std::move(mutated), estimator,
                                      config.length_penalty);
    const double delta = candidate.penalized - current.penalized;
    bool accept = delta >= 0.0;
    if (!accept) {
      const double theta = config.schedule.temperature(i, config.n_steps);
      if (theta > 0.0) accept = rng.uniform01() < std::exp(delta / theta);
    }
    if (candidate.penalized > best.penalized) best = candidate;
    if (accept) current = std::move(candidate);
  }

  const std::uint64_t used = estimator.queries() - q0;
  SaResult result;
  result.final_path = {current.route, current.skr, current.stderr_hz, used};
  result.best_seen = {best.route, best.skr, best.stderr_hz, used};
  return result;
}

std::size_t select_parent(const std::vector<double>& skrs, double theta,
                          SplitMix64& rng) {
  if (skrs.empty()) throw std::invalid_argument("empty population");
  if (!(theta >= 0)) throw std::invalid_argument("selection theta must be >= 0");
  const double m = *std::max_element(skrs.begin(), skrs.end());
  if (theta == 0.0) {
    // Greedy limit: uniform among the argmax set.
    std::vector<std::size_t> top;
    for (std::size_t i = 0; i < skrs.size(); ++i) {
      if (skrs[i] == m) top.push_back(i);
    }
    return top[rng.below(top.size())];
  }
  // Max-shifted softmax keeps the exponentials in (0, 1].
  std::vector<double> weights(skrs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < skrs.size(); ++i) {
    weights[i] = std::exp((skrs[i] - m) / theta);
    total += weights[i];
  }
  double u = rng.uniform01() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;  // floating-point residue
}

namespace {

/// Cuts every loop out of a node sequence: whenever a node reappears, the
/// walk since its first visit is dropped. The surviving consecutive pairs
/// all occurred consecutively somewhere in the input.
std::vector<int> remove_loops(const std::vector<int>& seq) {
  std::vector<int> out;
  out.reserve(seq.size());
  for (int v : seq) {
    const auto it = std::find(out.begin(), out.end(), v);
    if (it != out.end()) {
      out.erase(it + 1, out.end());
    } else {
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

std::vector<PathRoute> enumerate_recombinations(const NetworkGraph& g,
                                                const PathRoute& p1,
                                                const PathRoute& p2) {
  std::vector<PathRoute> out;
  const auto& n1 = p1.nodes;
  const auto& n2 = p2.nodes;
  // Any cut nodes with a connecting edge are allowed, end nodes included;
  // loop removal collapses the degenerate cuts back to a parent.
  for (std::size_t ai = 0; ai < n1.size(); ++ai) {
    for (std::size_t bi = 0; bi < n2.size(); ++bi) {
      if (!g.has_edge(n1[ai], n2[bi])) continue;
      std::vector<int> joined(n1.begin(), n1.begin() + static_cast<std::ptrdiff_t>(ai) + 1);
      joined.insert(joined.end(), n2.begin() + static_cast<std::ptrdiff_t>(bi), n2.end());
      out.push_back(PathRoute::from_nodes(g, remove_loops(joined)));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PathRoute& a, const PathRoute& b) { return a.nodes < b.nodes; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GaResult genetic_algorithm(const NetworkGraph& g, int s, int t,
                           const SkrEstimator& estimator, const GaConfig& config) {
  if (config.population < 1) throw std::invalid_argument("population must be >= 1");
  if (config.generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (!(config.selection_theta >= 0)) {
    throw std::invalid_argument("selection_theta must be >= 0");
  }
  if (config.mutation_rate < 0 || config.mutation_rate > 1) {
    throw std::invalid_argument("mutation_rate must be in [0, 1]");
  }

  SplitMix64 rng(config.seed);
  const std::uint64_t q0 = estimator.queries();
  const auto m = static_cast<std::size_t>(config.population);

  std::vector<PathRoute> population;
  population.reserve(m);
  population.push_back(PathRoute::from_nodes(g, min_length_path(g, s, t)));
  for (std::size_t i = 1; i < m; ++i) {
    population.push_back(PathRoute::from_nodes(
        g, random_simple_path(g, s, t, mix_seed(config.seed, i))));
  }

  std::vector<double> skrs(m), errs(m);
  const auto evaluate_population = [&] {
    for (std::size_t i = 0; i < m; ++i) {
      const auto est = estimator.evaluate_route(population[i]);
      skrs[i] = est.skr_hz;
      errs[i] = est.stderr_hz;
    }
  };
  evaluate_population();

  GaResult result;
  result.generation_best.push_back(*std::max_element(skrs.begin(), skrs.end()));

  std::vector<PathRoute> children;
  children.reserve(m);
  for (int gen = 1; gen <= config.generations; ++gen) {
    children.clear();
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t i1 = select_parent(skrs, config.selection_theta, rng);
      const std::size_t i2 = select_parent(skrs, config.selection_theta, rng);
      const auto recombined =
          enumerate_recombinations(g, population[i1], population[i2]);
      PathRoute child = recombined.empty()
                            ? population[i1]
                            : recombined[rng.below(recombined.size())];
      if (rng.uniform01() < config.mutation_rate) {
        child = random_mutation(g, child, rng);
      }
      children.push_back(std::move(child));
    }
    population.swap(children);
    evaluate_population();
    result.generation_best.push_back(*std::max_element(skrs.begin(), skrs.end()));
  }

  // Winner: highest rate, ties toward fewer edges then node order.
  std::size_t win = 0;
  for (std::size_t i = 1; i < m; ++i) {
    const bool better =
        skrs[i] > skrs[win] ||
        (skrs[i] == skrs[win] &&
         (population[i].nodes.size() < population[win].nodes.size() ||
          (population[i].nodes.size() == population[win].nodes.size() &&
           population[i].nodes < population[win].nodes)));
    if (better) win = i;
  }
  result.best = {population[win], skrs[win], errs[win], estimator.queries() - q0};
  return result;
}

}  // namespace qroute
