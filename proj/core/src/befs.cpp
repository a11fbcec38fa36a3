#include "qroute/befs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

namespace qroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_endpoints(const NetworkGraph& g, int s, int t) {
  if (s < 0 || s >= g.node_count() || t < 0 || t >= g.node_count()) {
    throw std::invalid_argument("endpoint id out of range");
  }
  if (s == t) throw std::invalid_argument("source and target must differ");
}

/// Queue ordering: higher merit first; ties prefer fewer edges, then the
/// lexicographically smaller node sequence.
bool entry_worse(double merit_a, const PathRoute& a, double merit_b,
                 const PathRoute& b) {
  if (merit_a != merit_b) return merit_a < merit_b;
  if (a.nodes.size() != b.nodes.size()) return a.nodes.size() > b.nodes.size();
  return a.nodes > b.nodes;
}

}  // namespace

std::vector<PathRoute> expand(const NetworkGraph& g, const PathRoute& p) {
  std::vector<PathRoute> out;
  const int u = p.end();
  for (auto [v, len] : g.neighbors(u)) {
    (void)len;
    if (p.contains(v)) continue;
    out.push_back(p.extended(g, v));
  }
  return out;
}

double unimodal_peak_search(const std::function<double(int)>& bound_fn) {
  std::map<int, double> memo;
  const auto eval = [&](int n) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    const double v = bound_fn(n);
    memo.emplace(n, v);
    return v;
  };

  int a = 1, b = 2, c = 4;
  if (eval(a) >= eval(b)) return eval(a);
  while (eval(c) > eval(b)) {
    a = b;
    b = c;
    c = 2 * c;
  }
  while (!(a + 1 == b && b + 1 == c)) {
    if (c - b > b - a) {
      const int d = (b + c) / 2;
      if (eval(d) > eval(b)) {
        a = b;
        b = d;
      } else {
        c = d;
      }
    } else {
      const int d = (a + b) / 2;
      if (eval(d) > eval(b)) {
        c = b;
        b = d;
      } else {
        a = d;
      }
    }
  }
  return eval(b);
}

MeritEvaluator::MeritEvaluator(MeritKind kind, const NetworkGraph& g, int target,
                               const SkrEstimator& estimator)
    : kind_(kind), g_(&g), target_(target), estimator_(&estimator) {
  if (target < 0 || target >= g.node_count()) {
    throw std::invalid_argument("target id out of range");
  }
  dist_to_target_ = distances_from(g, target);
  if (kind_ != MeritKind::Utility) {
    // Bound merits slice the remaining distance into suffix links, which
    // needs the finite link cutoff; fidelity 1 has none.
    links_cutoff_ = max_links(estimator.params().fidelity);
  }
}

MeritEvaluator::Value MeritEvaluator::operator()(const PathRoute& p) {
  if (p.nodes.size() == 1) return {kInf, 0.0};  // root: expanded before all else
  if (p.end() == target_ || kind_ == MeritKind::Utility) {
    const auto est = estimator_->evaluate_route(p);
    return {est.skr_hz, est.stderr_hz};
  }
  if (kind_ == MeritKind::ExactBound) return {exact_bound(p), 0.0};
  return {heuristic_bound(p), 0.0};
}

namespace {

/// Prefix lengths plus an evenly split suffix covering `dist` in `n_suffix`
/// links. Memories at and beyond the prefix end are flagged per `relaxed`.
ChainSpec suffix_chain(const PathRoute& p, double dist, int n_suffix, bool relaxed) {
  const std::size_t e = p.lengths.size();
  ChainSpec chain;
  chain.lengths_km = p.lengths;
  chain.lengths_km.reserve(e + static_cast<std::size_t>(n_suffix));
  const double seg = dist / n_suffix;
  for (int i = 0; i < n_suffix; ++i) chain.lengths_km.push_back(seg);
  if (relaxed) {
    // Intermediate nodes are indexed 1..links-1; the prefix's interior nodes
    // (flags 0..e-2) stay noisy, the prefix end and all suffix nodes are
    // treated as noiseless.
    chain.perfect_memory.assign(chain.lengths_km.size() - 1, false);
    for (std::size_t k = e >= 1 ? e - 1 : 0; k < chain.perfect_memory.size(); ++k) {
      chain.perfect_memory[k] = true;
    }
  }
  return chain;
}

}  // namespace

double MeritEvaluator::exact_bound(const PathRoute& p) {
  const int e = p.edge_count();
  const double d = dist_to_target_[static_cast<std::size_t>(p.end())];
  if (d == kInf) return 0.0;
  const int n_max = static_cast<int>(std::floor(links_cutoff_ - e));
  double best = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto est = estimator_->evaluate(suffix_chain(p, d, n, true));
    best = std::max(best, est.skr_hz);
  }
  return best;
}

double MeritEvaluator::heuristic_bound(const PathRoute& p) {
  const int e = p.edge_count();
  const double d = dist_to_target_[static_cast<std::size_t>(p.end())];
  if (d == kInf) return 0.0;
  const auto bound_fn = [&](int n) {
    if (static_cast<double>(e + n) >= links_cutoff_) return 0.0;
    return estimator_->evaluate(suffix_chain(p, d, n, false)).skr_hz;
  };
  return unimodal_peak_search(bound_fn);
}

double merit_utility(const PathRoute& p, const SkrEstimator& estimator) {
  if (p.nodes.size() == 1) return kInf;
  return estimator.evaluate_route(p).skr_hz;
}

double merit_exact(const PathRoute& p, const NetworkGraph& g, int target,
                   const SkrEstimator& estimator) {
  MeritEvaluator merit(MeritKind::ExactBound, g, target, estimator);
  return merit(p).merit;
}

double merit_heuristic(const PathRoute& p, const NetworkGraph& g, int target,
                       const SkrEstimator& estimator) {
  MeritEvaluator merit(MeritKind::HeuristicBound, g, target, estimator);
  return merit(p).merit;
}

bool dominates(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() > q.size()) return false;
  std::size_t j = 0;
  for (double x : p) {
    while (j < q.size() && q[j] < x) ++j;
    if (j == q.size()) return false;
    ++j;  // matched q[j] >= x; later matches must come strictly after
  }
  return true;
}

bool merit_dominates(const PathRoute& p, const PathRoute& q, double dist_p,
                     double dist_q) {
  const bool fwd = dominates(p.lengths, q.lengths) && dist_p <= dist_q;
  const bool bwd = dominates(q.lengths, p.lengths) && dist_q <= dist_p;
  if (fwd && bwd) return p.nodes < q.nodes;  // exactly one direction wins
  return fwd;
}

bool merit_dominates(const NetworkGraph& g, int target, const PathRoute& p,
                     const PathRoute& q) {
  const auto dist = distances_from(g, target);
  return merit_dominates(p, q, dist[static_cast<std::size_t>(p.end())],
                         dist[static_cast<std::size_t>(q.end())]);
}

namespace {

SearchResult befs_plain(const NetworkGraph& g, int s, int t,
                        const SkrEstimator& estimator, MeritEvaluator& merit) {
  struct Entry {
    double merit;
    double stderr_hz;
    PathRoute route;
  };
  const auto worse = [](const Entry& a, const Entry& b) {
    return entry_worse(a.merit, a.route, b.merit, b.route);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
  const std::uint64_t q0 = estimator.queries();

  queue.push({kInf, 0.0, PathRoute{{s}, {}}});
  while (!queue.empty()) {
    Entry top = queue.top();
    queue.pop();
    if (top.route.end() == t) {
      return {std::move(top.route), top.merit, top.stderr_hz,
              estimator.queries() - q0};
    }
    for (auto& child : expand(g, top.route)) {
      const auto value = merit(child);
      queue.push({value.merit, value.stderr_hz, std::move(child)});
    }
  }
  throw NoPathError("best-first search exhausted without reaching the target");
}

SearchResult befs_bounded(const NetworkGraph& g, int s, int t,
                          const SkrEstimator& estimator, MeritEvaluator& merit) {
  enum State : char { kPending, kQueued, kPopped };
  struct Pentry {
    PathRoute route;
    double dist = 0.0;
    int dominators = 0;          // alive entries dominating this one
    std::vector<int> dominated;  // entries this one dominates
    State state = kPending;
    double merit = 0.0;
    double stderr_hz = 0.0;
  };
  std::vector<Pentry> pool;
  const auto worse = [&pool](int ia, int ib) {
    return entry_worse(pool[static_cast<std::size_t>(ia)].merit,
                       pool[static_cast<std::size_t>(ia)].route,
                       pool[static_cast<std::size_t>(ib)].merit,
                       pool[static_cast<std::size_t>(ib)].route);
  };
  std::priority_queue<int, std::vector<int>, decltype(worse)> queue(worse);
  const std::uint64_t q0 = estimator.queries();

  const auto evaluate_and_queue = [&](int idx) {
    auto& e = pool[static_cast<std::size_t>(idx)];
    const auto value = merit(e.route);
    e.merit = value.merit;
    e.stderr_hz = value.stderr_hz;
    e.state = kQueued;
    queue.push(idx);
  };

  pool.push_back({PathRoute{{s}, {}}, merit.distance_to_target(s), 0, {}, kPending,
                  0.0, 0.0});
  evaluate_and_queue(0);

  std::vector<int> candidates;
  while (!queue.empty()) {
    const int top = queue.top();
    queue.pop();
    auto& popped = pool[static_cast<std::size_t>(top)];
    popped.state = kPopped;

    if (popped.route.end() == t) {
      return {popped.route, popped.merit, popped.stderr_hz,
              estimator.queries() - q0};
    }

    candidates.clear();
    // The popped prefix leaves the poset: anything it was holding back may
    // become maximal.
    for (int j : popped.dominated) {
      auto& other = pool[static_cast<std::size_t>(j)];
      if (--other.dominators == 0 && other.state == kPending) {
        candidates.push_back(j);
      }
    }

    for (auto& child : expand(g, popped.route)) {
      const int idx = static_cast<int>(pool.size());
      Pentry entry;
      entry.route = std::move(child);
      entry.dist = merit.distance_to_target(entry.route.end());
      for (int other_idx = 0; other_idx < idx; ++other_idx) {
        auto& other = pool[static_cast<std::size_t>(other_idx)];
        if (other.state == kPopped) continue;
        if (merit_dominates(other.route, entry.route, other.dist, entry.dist)) {
          ++entry.dominators;
          other.dominated.push_back(idx);
        } else if (merit_dominates(entry.route, other.route, entry.dist,
                                   other.dist)) {
          entry.dominated.push_back(other_idx);
          ++other.dominators;
        }
      }
      const bool free_now = entry.dominators == 0;
      pool.push_back(std::move(entry));
      if (free_now) candidates.push_back(idx);
    }

    std::sort(candidates.begin(), candidates.end());
    for (int idx : candidates) {
      const auto& e = pool[static_cast<std::size_t>(idx)];
      if (e.state == kPending && e.dominators == 0) evaluate_and_queue(idx);
    }
  }
  throw NoPathError("best-first search exhausted without reaching the target");
}

}  // namespace

SearchResult befs_search(const NetworkGraph& g, int s, int t,
                         const SkrEstimator& estimator, MeritKind kind,
                         bool prefix_bounded) {
  check_endpoints(g, s, t);
  MeritEvaluator merit(kind, g, t, estimator);
  return prefix_bounded ? befs_bounded(g, s, t, estimator, merit)
                        : befs_plain(g, s, t, estimator, merit);
}

SearchResult extended_dijkstra(const NetworkGraph& g, int s, int t,
                               const SkrEstimator& estimator) {
  check_endpoints(g, s, t);
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<double> best(n, -kInf);
  std::vector<double> errs(n, 0.0);
  std::vector<PathRoute> routes(n);
  std::vector<char> settled(n, 0);
  const std::uint64_t q0 = estimator.queries();

  using Item = std::pair<double, int>;
  const auto worse = [](const Item& a, const Item& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;  // equal utility: settle smaller ids first
  };
  std::priority_queue<Item, std::vector<Item>, decltype(worse)> queue(worse);

  best[static_cast<std::size_t>(s)] = kInf;
  routes[static_cast<std::size_t>(s)] = PathRoute{{s}, {}};
  queue.emplace(kInf, s);
  while (!queue.empty()) {
    const auto [util, u] = queue.top();
    queue.pop();
    const auto ui = static_cast<std::size_t>(u);
    if (settled[ui] || util != best[ui]) continue;
    settled[ui] = 1;
    if (u == t) {
      return {routes[ui], best[ui], errs[ui], estimator.queries() - q0};
    }
    for (auto [v, len] : g.neighbors(u)) {
      (void)len;
      const auto vi = static_cast<std::size_t>(v);
      if (settled[vi] || routes[ui].contains(v)) continue;
      const auto candidate = routes[ui].extended(g, v);
      const auto est = estimator.evaluate_route(candidate);
      if (est.skr_hz > best[vi]) {
        best[vi] = est.skr_hz;
        errs[vi] = est.stderr_hz;
        routes[vi] = candidate;
        queue.emplace(est.skr_hz, v);
      }
    }
  }
  throw NoPathError("target never settled; no usable path");
}

namespace {

void enumerate_paths_dfs(const NetworkGraph& g, int t, PathRoute& current,
                         std::vector<char>& visited,
                         const std::function<void(const PathRoute&)>& sink) {
  const int u = current.end();
  if (u == t) {
    sink(current);
    return;
  }
  visited[static_cast<std::size_t>(u)] = 1;
  for (auto [v, len] : g.neighbors(u)) {
    if (visited[static_cast<std::size_t>(v)]) continue;
    current.nodes.push_back(v);
    current.lengths.push_back(len);
    enumerate_paths_dfs(g, t, current, visited, sink);
    current.nodes.pop_back();
    current.lengths.pop_back();
  }
  visited[static_cast<std::size_t>(u)] = 0;
}

}  // namespace

SearchResult enumerate_best(const NetworkGraph& g, int s, int t,
                            const SkrEstimator& estimator,
                            std::uint64_t* path_count_out) {
  check_endpoints(g, s, t);
  const std::uint64_t q0 = estimator.queries();
  std::uint64_t count = 0;
  bool found = false;
  SearchResult best;

  PathRoute current{{s}, {}};
  std::vector<char> visited(static_cast<std::size_t>(g.node_count()), 0);
  enumerate_paths_dfs(g, t, current, visited, [&](const PathRoute& p) {
    ++count;
    const auto est = estimator.evaluate_route(p);
    const bool better =
        !found || est.skr_hz > best.skr_hz ||
        (est.skr_hz == best.skr_hz &&
         (p.nodes.size() < best.route.nodes.size() ||
          (p.nodes.size() == best.route.nodes.size() && p.nodes < best.route.nodes)));
    if (better) {
      best.route = p;
      best.skr_hz = est.skr_hz;
      best.stderr_hz = est.stderr_hz;
      found = true;
    }
  });

  if (path_count_out != nullptr) *path_count_out = count;
  if (!found) throw NoPathError("no simple path between the endpoints");
  best.queries = estimator.queries() - q0;
  return best;
}

}  // namespace qroute
