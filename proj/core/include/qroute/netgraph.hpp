#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qroute {

enum class NodeKind : std::uint8_t {
  EndNode,   // communicating party: measures immediately, no memory dwell
  Repeater,  // intermediate station holding qubits in quantum memory
};

struct NetworkNode {
  int id = 0;
  double x = 0.0;  // km
  double y = 0.0;  // km
  NodeKind kind = NodeKind::Repeater;
};

struct GraphEdge {
  int u = 0;  // stored with u < v
  int v = 0;
  double length = 0.0;  // km, always > 0
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Thrown when no simple path connects the requested endpoints.
struct NoPathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/**
 * Undirected simple graph with geometric node positions and positive edge
 * lengths. Node ids are dense [0, node_count). Immutable after construction;
 * adjacency lists are kept sorted by neighbor id so traversals are
 * deterministic.
 */
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(std::vector<NetworkNode> nodes, std::vector<GraphEdge> edges);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const NetworkNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<NetworkNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }

  /// Neighbors of `id` with edge lengths, sorted by ascending neighbor id.
  const std::vector<std::pair<int, double>>& neighbors(int id) const {
    return adj_.at(static_cast<std::size_t>(id));
  }

  bool has_edge(int u, int v) const;
  /// Length of edge {u, v}; throws std::out_of_range if the edge is absent.
  double edge_length(int u, int v) const;

  double euclidean(int u, int v) const;

  /// The two EndNode ids, in id order. Throws if the graph does not have
  /// exactly two end nodes.
  std::pair<int, int> end_nodes() const;

 private:
  std::vector<NetworkNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

/**
 * A simple path through a NetworkGraph: the visited node ids plus the
 * traversed edge lengths (one fewer than nodes). A single-node route is a
 * valid (edgeless) path prefix.
 */
struct PathRoute {
  std::vector<int> nodes;
  std::vector<double> lengths;

  /// Builds a route from a node sequence, validating adjacency and
  /// simplicity against the graph.
  static PathRoute from_nodes(const NetworkGraph& g, std::vector<int> node_seq);

  int edge_count() const { return static_cast<int>(lengths.size()); }
  int end() const { return nodes.back(); }
  bool contains(int id) const;
  /// Extends this route by the edge (end, next); next must be adjacent and
  /// not already visited.
  PathRoute extended(const NetworkGraph& g, int next) const;

  bool operator==(const PathRoute& other) const = default;
};

struct GraphGenConfig {
  int n_repeaters = 0;
  double side = 300.0;          // km; placement square is [0, side]^2
  double waxman_alpha = 0.5;    // locality strength (larger => longer edges)
  double waxman_beta = 0.9;     // overall edge density
  double waxman_scale = 300.0;  // km; distance normalization in the edge rule
  std::uint64_t seed = 0;
};

/**
 * Random geometric graph in the Waxman family: repeaters placed uniformly in
 * the square, the two end nodes fixed at (side/4, side/4) and
 * (3*side/4, 3*side/4), and every node pair (end-node pairs included) given
 * an edge independently with probability beta * exp(-d / (scale * alpha)).
 * Edge lengths are Euclidean distances.
 */
NetworkGraph waxman_generate(const GraphGenConfig& config);

/// Shortest-path distance by summed edge length; std::nullopt if unreachable.
std::optional<double> graph_distance(const NetworkGraph& g, int u, int v);

/// Single-source shortest-path distances by summed edge length; unreachable
/// nodes get +infinity.
std::vector<double> distances_from(const NetworkGraph& g, int source);

/// Minimum-total-length simple path from s to t (ties broken toward smaller
/// node ids). Throws NoPathError if t is unreachable.
std::vector<int> min_length_path(const NetworkGraph& g, int s, int t);

/**
 * Removes every edge that lies on no simple s-t path. Keeps the node set
 * (ids stay dense); only the edge set shrinks. Implemented by adding a
 * virtual s-t edge and keeping the biconnected component containing it.
 * Throws NoPathError if s and t are disconnected, std::invalid_argument if
 * s == t.
 */
NetworkGraph prune_to_st_biconnected(const NetworkGraph& g, int s, int t);

/**
 * Rigid transform plus uniform scale mapping s to (-1, 0) and t to (1, 0);
 * returns the transformed coordinates of every node, indexed by id.
 * Distance ratios are preserved.
 */
std::vector<Point> normalize_coordinates(const NetworkGraph& g, int s, int t);

enum class DirectionHeuristic {
  None,    // keep (s, t) as given
  Mean,    // forward iff mean normalized repeater x >= 0
  Median,  // forward iff median normalized repeater x >= 0
};

/**
 * Chooses the search direction: returns (s, t) or (t, s) depending on where
 * the repeater mass sits in normalized coordinates. Ties (statistic exactly
 * zero, or no repeaters) resolve forward to (s, t).
 */
std::pair<int, int> choose_direction(const NetworkGraph& g, int s, int t,
                                     DirectionHeuristic heuristic);

/// Uniform-ish random simple s-t path: randomized DFS, deterministic per
/// seed. Throws NoPathError if none exists.
std::vector<int> random_simple_path(const NetworkGraph& g, int s, int t,
                                    std::uint64_t seed);

/// JSON serialization. Nodes carry id/x/y/kind; edges carry u/v/length.
/// On load, a missing edge length defaults to the Euclidean distance between
/// the endpoints; non-positive lengths (including coincident endpoints of a
/// defaulted edge) are rejected.
std::string graph_to_json(const NetworkGraph& g);
NetworkGraph graph_from_json(const std::string& text);
void save_graph(const NetworkGraph& g, const std::string& path);
NetworkGraph load_graph(const std::string& path);

}  // namespace qroute
