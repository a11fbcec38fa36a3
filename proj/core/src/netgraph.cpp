#include "qroute/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qroute/rng.hpp"

namespace qroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_node_id(const NetworkGraph& g, int id, const char* what) {
  if (id < 0 || id >= g.node_count()) {
    throw std::invalid_argument(std::string(what) + " id out of range: " +
                                std::to_string(id));
  }
}

}  // namespace

NetworkGraph::NetworkGraph(std::vector<NetworkNode> nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const NetworkNode& a, const NetworkNode& b) { return a.id < b.id; });
  const int n = node_count();
  for (int i = 0; i < n; ++i) {
    if (nodes_[static_cast<std::size_t>(i)].id != i) {
      throw std::invalid_argument("node ids must be unique and dense from 0");
    }
    const auto& nd = nodes_[static_cast<std::size_t>(i)];
    if (!std::isfinite(nd.x) || !std::isfinite(nd.y)) {
      throw std::invalid_argument("node coordinates must be finite");
    }
  }

  adj_.assign(static_cast<std::size_t>(n), {});
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v) throw std::invalid_argument("self-loop edges are not allowed");
    if (e.u < 0 || e.v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw std::invalid_argument("edge lengths must be positive and finite");
    }
    if (!seen.emplace(e.u, e.v).second) {
      throw std::invalid_argument("duplicate edge");
    }
    adj_[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.length);
    adj_[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.length);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

bool NetworkGraph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= node_count() || v >= node_count() || u == v) return false;
  const auto& nbrs = adj_[static_cast<std::size_t>(u)];
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), std::make_pair(v, -kInf));
  return it != nbrs.end() && it->first == v;
}

double NetworkGraph::edge_length(int u, int v) const {
  const auto& nbrs = adj_.at(static_cast<std::size_t>(u));
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), std::make_pair(v, -kInf));
  if (it == nbrs.end() || it->first != v) {
    throw std::out_of_range("no edge between " + std::to_string(u) + " and " +
                            std::to_string(v));
  }
  return it->second;
}

double NetworkGraph::euclidean(int u, int v) const {
  const auto& a = node(u);
  const auto& b = node(v);
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::pair<int, int> NetworkGraph::end_nodes() const {
  std::vector<int> ends;
  for (const auto& nd : nodes_) {
    if (nd.kind == NodeKind::EndNode) ends.push_back(nd.id);
  }
  if (ends.size() != 2) {
    throw std::invalid_argument("graph must have exactly two end nodes, found " +
                                std::to_string(ends.size()));
  }
  return {ends[0], ends[1]};
}

PathRoute PathRoute::from_nodes(const NetworkGraph& g, std::vector<int> node_seq) {
  if (node_seq.empty()) throw std::invalid_argument("empty node sequence");
  PathRoute r;
  r.lengths.reserve(node_seq.size() - 1);
  std::set<int> distinct(node_seq.begin(), node_seq.end());
  if (distinct.size() != node_seq.size()) {
    throw std::invalid_argument("path revisits a node");
  }
  for (std::size_t i = 0; i + 1 < node_seq.size(); ++i) {
    if (!g.has_edge(node_seq[i], node_seq[i + 1])) {
      throw std::invalid_argument("consecutive path nodes are not adjacent");
    }
    r.lengths.push_back(g.edge_length(node_seq[i], node_seq[i + 1]));
  }
  r.nodes = std::move(node_seq);
  return r;
}

bool PathRoute::contains(int id) const {
  return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

PathRoute PathRoute::extended(const NetworkGraph& g, int next) const {
  if (contains(next)) throw std::invalid_argument("extension revisits a node");
  if (!g.has_edge(end(), next)) {
    throw std::invalid_argument("extension is not adjacent to the path end");
  }
  PathRoute r = *this;
  r.lengths.push_back(g.edge_length(end(), next));
  r.nodes.push_back(next);
  return r;
}

NetworkGraph waxman_generate(const GraphGenConfig& config) {
  if (config.n_repeaters < 0) throw std::invalid_argument("n_repeaters must be >= 0");
  if (!(config.side > 0)) throw std::invalid_argument("side must be > 0");
  if (!(config.waxman_alpha > 0)) throw std::invalid_argument("waxman_alpha must be > 0");
  if (config.waxman_beta < 0 || config.waxman_beta > 1) {
    throw std::invalid_argument("waxman_beta must be in [0, 1]");
  }
  if (!(config.waxman_scale > 0)) throw std::invalid_argument("waxman_scale must be > 0");

  SplitMix64 rng(config.seed);
  std::vector<NetworkNode> nodes;
  const int n = config.n_repeaters + 2;
  nodes.reserve(static_cast<std::size_t>(n));
  nodes.push_back({0, config.side / 4, config.side / 4, NodeKind::EndNode});
  nodes.push_back({1, 3 * config.side / 4, 3 * config.side / 4, NodeKind::EndNode});
  for (int i = 2; i < n; ++i) {
    const double x = rng.uniform(0.0, config.side);
    const double y = rng.uniform(0.0, config.side);
    nodes.push_back({i, x, y, NodeKind::Repeater});
  }

  std::vector<GraphEdge> edges;
  const double denom = config.waxman_scale * config.waxman_alpha;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double u = rng.uniform01();  // always drawn, keeps streams aligned
      const double d = std::hypot(nodes[static_cast<std::size_t>(i)].x -
                                      nodes[static_cast<std::size_t>(j)].x,
                                  nodes[static_cast<std::size_t>(i)].y -
                                      nodes[static_cast<std::size_t>(j)].y);
      if (d <= 0.0) continue;  // coincident nodes cannot carry a fiber
      const double p = config.waxman_beta * std::exp(-d / denom);
      if (u < p) edges.push_back({i, j, d});
    }
  }
  return NetworkGraph(std::move(nodes), std::move(edges));
}

std::vector<double> distances_from(const NetworkGraph& g, int source) {
  check_node_id(g, source, "source");
  std::vector<double> dist(static_cast<std::size_t>(g.node_count()), kInf);
  dist[static_cast<std::size_t>(source)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (auto [v, len] : g.neighbors(u)) {
      const double nd = d + len;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return dist;
}

std::optional<double> graph_distance(const NetworkGraph& g, int u, int v) {
  check_node_id(g, u, "u");
  check_node_id(g, v, "v");
  if (u == v) return 0.0;
  const double d = distances_from(g, u)[static_cast<std::size_t>(v)];
  if (d == kInf) return std::nullopt;
  return d;
}

std::vector<int> min_length_path(const NetworkGraph& g, int s, int t) {
  check_node_id(g, s, "s");
  check_node_id(g, t, "t");
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<double> dist(n, kInf);
  std::vector<int> parent(n, -1);
  dist[static_cast<std::size_t>(s)] = 0.0;
  using Item = std::pair<double, int>;  // settle smaller ids first on ties
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0.0, s);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (auto [v, len] : g.neighbors(u)) {
      const double nd = d + len;
      auto& dv = dist[static_cast<std::size_t>(v)];
      auto& pv = parent[static_cast<std::size_t>(v)];
      if (nd < dv) {
        dv = nd;
        pv = u;
        pq.emplace(nd, v);
      } else if (nd == dv && pv >= 0 && u < pv) {
        pv = u;  // same length, canonical parent: keeps the result seed-free
      }
    }
  }
  if (dist[static_cast<std::size_t>(t)] == kInf) {
    throw NoPathError("no path between " + std::to_string(s) + " and " +
                      std::to_string(t));
  }
  std::vector<int> path;
  for (int v = t; v != -1; v = parent[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

NetworkGraph prune_to_st_biconnected(const NetworkGraph& g, int s, int t) {
  check_node_id(g, s, "s");
  check_node_id(g, t, "t");
  if (s == t) throw std::invalid_argument("s and t must differ");
  if (!graph_distance(g, s, t)) {
    throw NoPathError("s and t are disconnected");
  }

  // Edge-indexed adjacency including one virtual s-t edge at index m. The
  // edges on some simple s-t path are exactly those sharing a biconnected
  // component with the virtual edge.
  const int n = g.node_count();
  const int m = g.edge_count();
  std::vector<std::vector<std::pair<int, int>>> adjx(static_cast<std::size_t>(n));
  for (int e = 0; e < m; ++e) {
    const auto& edge = g.edges()[static_cast<std::size_t>(e)];
    adjx[static_cast<std::size_t>(edge.u)].emplace_back(edge.v, e);
    adjx[static_cast<std::size_t>(edge.v)].emplace_back(edge.u, e);
  }
  adjx[static_cast<std::size_t>(s)].emplace_back(t, m);
  adjx[static_cast<std::size_t>(t)].emplace_back(s, m);

  std::vector<int> disc(static_cast<std::size_t>(n), 0);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  std::vector<int> edge_stack;
  std::vector<std::vector<int>> components;
  int timer = 0;

  struct Frame {
    int u;
    int parent_edge;
    std::size_t it;
  };
  std::vector<Frame> stack;
  disc[static_cast<std::size_t>(s)] = low[static_cast<std::size_t>(s)] = ++timer;
  stack.push_back({s, -1, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& nbrs = adjx[static_cast<std::size_t>(f.u)];
    if (f.it < nbrs.size()) {
      const auto [v, eidx] = nbrs[f.it++];
      if (eidx == f.parent_edge) continue;
      auto& dv = disc[static_cast<std::size_t>(v)];
      if (dv == 0) {
        edge_stack.push_back(eidx);
        dv = low[static_cast<std::size_t>(v)] = ++timer;
        stack.push_back({v, eidx, 0});  // invalidates f; loop re-fetches
      } else if (dv < disc[static_cast<std::size_t>(f.u)]) {
        edge_stack.push_back(eidx);
        auto& lu = low[static_cast<std::size_t>(f.u)];
        lu = std::min(lu, dv);
      }
    } else {
      const Frame done = f;
      stack.pop_back();
      if (!stack.empty()) {
        Frame& pf = stack.back();
        auto& lp = low[static_cast<std::size_t>(pf.u)];
        lp = std::min(lp, low[static_cast<std::size_t>(done.u)]);
        if (low[static_cast<std::size_t>(done.u)] >=
            disc[static_cast<std::size_t>(pf.u)]) {
          components.emplace_back();
          while (true) {
            const int e = edge_stack.back();
            edge_stack.pop_back();
            components.back().push_back(e);
            if (e == done.parent_edge) break;
          }
        }
      }
    }
  }

  std::vector<char> keep(static_cast<std::size_t>(m), 0);
  for (const auto& comp : components) {
    if (std::find(comp.begin(), comp.end(), m) == comp.end()) continue;
    for (int e : comp) {
      if (e != m) keep[static_cast<std::size_t>(e)] = 1;
    }
    break;
  }

  std::vector<GraphEdge> kept;
  for (int e = 0; e < m; ++e) {
    if (keep[static_cast<std::size_t>(e)]) {
      kept.push_back(g.edges()[static_cast<std::size_t>(e)]);
    }
  }
  return NetworkGraph(g.nodes(), std::move(kept));
}

std::vector<Point> normalize_coordinates(const NetworkGraph& g, int s, int t) {
  check_node_id(g, s, "s");
  check_node_id(g, t, "t");
  const auto& ps = g.node(s);
  const auto& pt = g.node(t);
  const double dx = pt.x - ps.x;
  const double dy = pt.y - ps.y;
  const double len = std::hypot(dx, dy);
  if (!(len > 0)) throw std::invalid_argument("s and t coincide; no direction");
  const double cx = (ps.x + pt.x) / 2;
  const double cy = (ps.y + pt.y) / 2;
  const double cosr = dx / len;
  const double sinr = dy / len;
  const double scale = 2.0 / len;
  std::vector<Point> out(static_cast<std::size_t>(g.node_count()));
  for (const auto& nd : g.nodes()) {
    const double qx = nd.x - cx;
    const double qy = nd.y - cy;
    out[static_cast<std::size_t>(nd.id)] = {(qx * cosr + qy * sinr) * scale,
                                            (-qx * sinr + qy * cosr) * scale};
  }
  return out;
}

std::pair<int, int> choose_direction(const NetworkGraph& g, int s, int t,
                                     DirectionHeuristic heuristic) {
  if (heuristic == DirectionHeuristic::None) return {s, t};
  const auto coords = normalize_coordinates(g, s, t);
  std::vector<double> xs;
  xs.reserve(coords.size());
  for (const auto& nd : g.nodes()) {
    if (nd.id == s || nd.id == t) continue;
    xs.push_back(coords[static_cast<std::size_t>(nd.id)].x);
  }
  if (xs.empty()) return {s, t};

  double stat = 0.0;
  if (heuristic == DirectionHeuristic::Mean) {
    for (double x : xs) stat += x;
    stat /= static_cast<double>(xs.size());
  } else {
    std::sort(xs.begin(), xs.end());
    const std::size_t half = xs.size() / 2;
    stat = (xs.size() % 2 == 1) ? xs[half] : (xs[half - 1] + xs[half]) / 2;
  }
  // Mass ahead of the midpoint: search from s (forward); otherwise flip.
  return stat >= 0.0 ? std::make_pair(s, t) : std::make_pair(t, s);
}

namespace {

bool random_path_dfs(const NetworkGraph& g, int u, int t, SplitMix64& rng,
                     std::vector<char>& visited, std::vector<int>& path) {
  path.push_back(u);
  if (u == t) return true;
  visited[static_cast<std::size_t>(u)] = 1;
  std::vector<int> order;
  order.reserve(g.neighbors(u).size());
  for (auto [v, len] : g.neighbors(u)) {
    (void)len;
    if (!visited[static_cast<std::size_t>(v)]) order.push_back(v);
  }
  rng.shuffle(order);
  for (int v : order) {
    if (visited[static_cast<std::size_t>(v)]) continue;
    if (random_path_dfs(g, v, t, rng, visited, path)) return true;
  }
  visited[static_cast<std::size_t>(u)] = 0;  // backtrack
  path.pop_back();
  return false;
}

}  // namespace

std::vector<int> random_simple_path(const NetworkGraph& g, int s, int t,
                                    std::uint64_t seed) {
  check_node_id(g, s, "s");
  check_node_id(g, t, "t");
  SplitMix64 rng(seed);
  std::vector<char> visited(static_cast<std::size_t>(g.node_count()), 0);
  std::vector<int> path;
  if (!random_path_dfs(g, s, t, rng, visited, path)) {
    throw NoPathError("no path between " + std::to_string(s) + " and " +
                      std::to_string(t));
  }
  return path;
}

std::string graph_to_json(const NetworkGraph& g) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& nd : g.nodes()) {
    j["nodes"].push_back({{"id", nd.id},
                          {"x", nd.x},
                          {"y", nd.y},
                          {"kind", nd.kind == NodeKind::EndNode ? "end" : "repeater"}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}});
  }
  return j.dump(2);
}

NetworkGraph graph_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.at("nodes").is_array() || j.at("nodes").empty()) {
    throw std::invalid_argument("graph JSON needs a non-empty nodes array");
  }
  std::vector<NetworkNode> nodes;
  for (const auto& jn : j.at("nodes")) {
    NetworkNode nd;
    nd.id = jn.at("id").get<int>();
    nd.x = jn.at("x").get<double>();
    nd.y = jn.at("y").get<double>();
    const auto kind = jn.at("kind").get<std::string>();
    if (kind == "end") {
      nd.kind = NodeKind::EndNode;
    } else if (kind == "repeater") {
      nd.kind = NodeKind::Repeater;
    } else {
      throw std::invalid_argument("unknown node kind: " + kind);
    }
    nodes.push_back(nd);
  }
  std::vector<GraphEdge> edges;
  for (const auto& je : j.at("edges")) {
    GraphEdge e;
    e.u = je.at("u").get<int>();
    e.v = je.at("v").get<int>();
    if (je.contains("length")) {
      e.length = je.at("length").get<double>();
    } else {
      const auto fu = static_cast<std::size_t>(e.u);
      const auto fv = static_cast<std::size_t>(e.v);
      if (fu >= nodes.size() || fv >= nodes.size()) {
        throw std::invalid_argument("edge endpoint out of range");
      }
      e.length = std::hypot(nodes[fu].x - nodes[fv].x, nodes[fu].y - nodes[fv].y);
    }
    edges.push_back(e);
  }
  return NetworkGraph(std::move(nodes), std::move(edges));
}

void save_graph(const NetworkGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << graph_to_json(g) << '\n';
}

NetworkGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json(ss.str());
}

}  // namespace qroute
