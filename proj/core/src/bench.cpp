#include "qroute/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace qroute {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream labels keeping the suite's derived seeds disjoint by purpose.
constexpr std::uint64_t kGraphStream = 0x6772617068ull;   // graph generation
constexpr std::uint64_t kEvalStream = 0x6576616cull;      // estimator seeds
constexpr std::uint64_t kAlgoStream = 0x616c676full;      // metaheuristic seeds
constexpr std::uint64_t kWitnessStream = 0x7769746eull;   // scan witness graphs
constexpr std::uint64_t kGridStream = 0x67726964ull;      // scan grid graphs

bool known_algorithm(const std::string& name) {
  for (const char* n : kAlgorithmNames) {
    if (name == n) return true;
  }
  return false;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  const auto dt = std::chrono::steady_clock::now() - start;
  return std::chrono::duration<double, std::milli>(dt).count();
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_u64(std::string& out, std::uint64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_int(std::string& out, int v) {
  char buf[16];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_route(std::string& out, const std::vector<int>& route) {
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (i) out.push_back('-');
    append_int(out, route[i]);
  }
}

template <typename T>
T parse_number(std::string_view field, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  // from_chars rejects a leading '+' and, for floats, wants lowercase
  // inf/nan, which is exactly what to_chars emitted.
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw std::invalid_argument(std::string("bad CSV field for ") + what + ": " +
                                std::string(field));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::pair<NetworkGraph, std::uint64_t> suite_graph(const GraphGenConfig& tmpl,
                                                   int n_repeaters, int index,
                                                   std::uint64_t master_seed,
                                                   int max_attempts) {
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  GraphGenConfig cfg = tmpl;
  cfg.n_repeaters = n_repeaters;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    // The attempt enters the label, not the loop bound, so raising
    // max_attempts never re-seeds instances that already succeeded.
    cfg.seed = mix_seed(mix_seed(master_seed, kGraphStream),
                        mix_seed(static_cast<std::uint64_t>(n_repeaters),
                                 static_cast<std::uint64_t>(index) * 1024ull +
                                     static_cast<std::uint64_t>(attempt)));
    NetworkGraph g = waxman_generate(cfg);
    const auto [s, t] = g.end_nodes();
    if (graph_distance(g, s, t).has_value()) return {std::move(g), cfg.seed};
  }
  throw std::runtime_error("no connected instance after max_attempts draws");
}

SearchResult run_algorithm(const NetworkGraph& g, int s, int t,
                           const AlgorithmSpec& algo, const PhysicalParams& params,
                           std::uint64_t n_samples, std::uint64_t eval_seed) {
  QueryCounter counter;
  const SkrEstimator estimator(params, n_samples, eval_seed, &counter);
  if (algo.name == "enumeration") return enumerate_best(g, s, t, estimator);
  if (algo.name == "dijkstra") return extended_dijkstra(g, s, t, estimator);
  if (algo.name == "befs-utility") {
    return befs_search(g, s, t, estimator, MeritKind::Utility, false);
  }
  if (algo.name == "befs-exact") {
    return befs_search(g, s, t, estimator, MeritKind::ExactBound, false);
  }
  if (algo.name == "befs-heuristic") {
    return befs_search(g, s, t, estimator, MeritKind::HeuristicBound, true);
  }
  const std::uint64_t algo_seed =
      mix_seed(mix_seed(eval_seed, kAlgoStream),
               hash_bytes(algo.name.data(), algo.name.size()));
  if (algo.name == "annealing") {
    SaConfig sa = algo.sa;
    sa.seed = algo_seed;
    return simulated_annealing(g, s, t, estimator, sa).final_path;
  }
  if (algo.name == "genetic") {
    GaConfig ga = algo.ga;
    ga.seed = algo_seed;
    return genetic_algorithm(g, s, t, estimator, ga).best;
  }
  throw std::invalid_argument("unknown algorithm: " + algo.name);
}

namespace {

struct GraphTask {
  int graph_id = 0;
  int n_repeaters = 0;
  int index = 0;  // instance index within its repeater count
};

std::vector<BenchmarkRecord> run_graph_task(const GraphTask& task,
                                            const SuiteConfig& config) {
  std::vector<BenchmarkRecord> records;
  records.reserve(config.algorithms.size());

  NetworkGraph graph;
  std::uint64_t eval_seed = 0;
  bool prepared = false;
  int s = 0, t = 0;
  bool reversed = false;
  try {
    auto [g, graph_seed] =
        suite_graph(config.graph_template, task.n_repeaters, task.index,
                    config.master_seed, config.max_generation_attempts);
    const auto ends = g.end_nodes();
    graph = config.prune ? prune_to_st_biconnected(g, ends.first, ends.second)
                         : std::move(g);
    const auto dir =
        choose_direction(graph, ends.first, ends.second, config.direction);
    s = dir.first;
    t = dir.second;
    reversed = s != ends.first;
    eval_seed = mix_seed(mix_seed(config.master_seed, kEvalStream),
                         static_cast<std::uint64_t>(task.graph_id));
    prepared = true;
  } catch (const std::exception&) {
    prepared = false;
  }

  for (const auto& algo : config.algorithms) {
    BenchmarkRecord rec;
    rec.graph_id = task.graph_id;
    rec.n_repeaters = task.n_repeaters;
    rec.algorithm = algo.name;
    rec.seed = eval_seed;
    rec.skr_hz = kNaN;
    const auto start = std::chrono::steady_clock::now();
    if (prepared) {
      try {
        SearchResult result = run_algorithm(graph, s, t, algo, config.params,
                                            config.n_samples, eval_seed);
        rec.skr_hz = result.skr_hz;
        rec.query_count = result.queries;
        rec.route = std::move(result.route.nodes);
        // Records always list the route from the lower-id end node, whatever
        // direction the search actually ran.
        if (reversed) std::reverse(rec.route.begin(), rec.route.end());
      } catch (const std::exception&) {
        rec.skr_hz = kNaN;
        rec.route.clear();
        rec.query_count = 0;
      }
    }
    rec.wall_time_ms = config.record_wall_time ? elapsed_ms(start) : 0.0;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<BenchmarkRecord> run_suite(const SuiteConfig& config) {
  if (config.graphs_per_count < 0) {
    throw std::invalid_argument("graphs_per_count must be >= 0");
  }
  if (config.algorithms.empty()) {
    throw std::invalid_argument("no algorithms configured");
  }
  if (config.repeater_counts.empty()) {
    throw std::invalid_argument("no repeater counts configured");
  }
  for (const auto& algo : config.algorithms) {
    if (!known_algorithm(algo.name)) {
      throw std::invalid_argument("unknown algorithm: " + algo.name);
    }
  }
  config.params.validate();

  std::vector<GraphTask> tasks;
  int graph_id = 0;
  for (int count : config.repeater_counts) {
    if (count < 0) throw std::invalid_argument("repeater counts must be >= 0");
    for (int index = 0; index < config.graphs_per_count; ++index) {
      tasks.push_back({graph_id++, count, index});
    }
  }

  std::vector<std::vector<BenchmarkRecord>> per_graph(tasks.size());
  unsigned n_workers = config.workers > 0
                           ? static_cast<unsigned>(config.workers)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, std::max<std::size_t>(tasks.size(), 1));

  std::atomic<std::size_t> next_task{0};
  const auto worker = [&] {
    while (true) {
      const std::size_t i = next_task.fetch_add(1, std::memory_order_relaxed);
      if (i >= tasks.size()) return;
      per_graph[i] = run_graph_task(tasks[i], config);
    }
  };
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }

  std::vector<BenchmarkRecord> records;
  for (auto& group : per_graph) {
    for (auto& rec : group) records.push_back(std::move(rec));
  }
  std::sort(records.begin(), records.end(),
            [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
              if (a.graph_id != b.graph_id) return a.graph_id < b.graph_id;
              return a.algorithm < b.algorithm;
            });
  return records;
}

std::map<std::string, double> relative_inefficiency(
    const std::vector<BenchmarkRecord>& graph_records) {
  double best = 0.0;
  for (const auto& rec : graph_records) {
    if (std::isfinite(rec.skr_hz)) best = std::max(best, rec.skr_hz);
  }
  std::map<std::string, double> out;
  for (const auto& rec : graph_records) {
    if (!std::isfinite(rec.skr_hz)) {
      out[rec.algorithm] = kNaN;
    } else if (best <= 0.0) {
      out[rec.algorithm] = 0.0;
    } else {
      out[rec.algorithm] = (best - rec.skr_hz) / best;
    }
  }
  return out;
}

std::vector<double> relative_inefficiency(const std::vector<double>& skrs) {
  double best = 0.0;
  for (double v : skrs) best = std::max(best, v);
  std::vector<double> out(skrs.size(), 0.0);
  if (best <= 0.0) return out;
  for (std::size_t i = 0; i < skrs.size(); ++i) {
    out[i] = (best - skrs[i]) / best;
  }
  return out;
}

namespace {
constexpr const char* kCsvHeader =
    "graph_id,n_repeaters,algorithm,skr_hz,query_count,wall_time_ms,seed,route";
}

std::string records_to_csv(const std::vector<BenchmarkRecord>& records) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const auto& rec : records) {
    append_int(out, rec.graph_id);
    out.push_back(',');
    append_int(out, rec.n_repeaters);
    out.push_back(',');
    out.append(rec.algorithm);
    out.push_back(',');
    append_double(out, rec.skr_hz);
    out.push_back(',');
    append_u64(out, rec.query_count);
    out.push_back(',');
    append_double(out, rec.wall_time_ms);
    out.push_back(',');
    append_u64(out, rec.seed);
    out.push_back(',');
    append_route(out, rec.route);
    out.push_back('\n');
  }
  return out;
}

std::vector<BenchmarkRecord> records_from_csv(const std::string& text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kCsvHeader) {
    throw std::invalid_argument("missing benchmark CSV header");
  }
  std::vector<BenchmarkRecord> records;
  records.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split(lines[li], ',');
    if (fields.size() != 8) {
      throw std::invalid_argument("benchmark CSV row needs 8 fields");
    }
    BenchmarkRecord rec;
    rec.graph_id = parse_number<int>(fields[0], "graph_id");
    rec.n_repeaters = parse_number<int>(fields[1], "n_repeaters");
    rec.algorithm = std::string(fields[2]);
    rec.skr_hz = parse_number<double>(fields[3], "skr_hz");
    rec.query_count = parse_number<std::uint64_t>(fields[4], "query_count");
    rec.wall_time_ms = parse_number<double>(fields[5], "wall_time_ms");
    rec.seed = parse_number<std::uint64_t>(fields[6], "seed");
    if (!fields[7].empty()) {
      for (const auto part : split(fields[7], '-')) {
        rec.route.push_back(parse_number<int>(part, "route"));
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string svg_scatter(const std::vector<BenchmarkRecord>& records) {
  // Inefficiency is defined per graph, against that graph's best record.
  std::map<int, std::vector<BenchmarkRecord>> by_graph;
  for (const auto& rec : records) by_graph[rec.graph_id].push_back(rec);

  struct PointDatum {
    double x = 0, y = 0;
    std::string algorithm;
  };
  std::vector<PointDatum> points;
  double x_min = std::numeric_limits<double>::infinity(), x_max = 0.0;
  for (const auto& [id, group] : by_graph) {
    const auto ineff = relative_inefficiency(group);
    for (const auto& rec : group) {
      const double e = ineff.at(rec.algorithm);
      if (!std::isfinite(e) || rec.query_count == 0) continue;
      const double x = std::log10(static_cast<double>(rec.query_count));
      points.push_back({x, e, rec.algorithm});
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
  }
  if (points.empty()) {
    x_min = 0;
    x_max = 1;
  }
  if (x_max - x_min < 1e-9) x_max = x_min + 1;

  static const std::map<std::string, const char*> kColors = {
      {"enumeration", "#555555"},   {"dijkstra", "#d62728"},
      {"befs-utility", "#1f77b4"},  {"befs-exact", "#2ca02c"},
      {"befs-heuristic", "#9467bd"}, {"annealing", "#ff7f0e"},
      {"genetic", "#8c564b"},
  };

  const double width = 860, height = 520;
  const double ml = 70, mr = 180, mt = 30, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  const auto sy = [&](double y) { return mt + (1.0 - y) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

  // Axes.
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = static_cast<double>(i) / 4.0;
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(y) << "\" x2=\"" << ml
        << "\" y2=\"" << sy(y) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << sy(y) + 4
        << "\" text-anchor=\"end\">" << y << "</text>\n";
  }
  const int tick_lo = static_cast<int>(std::floor(x_min));
  const int tick_hi = static_cast<int>(std::ceil(x_max));
  for (int e = tick_lo; e <= tick_hi; ++e) {
    if (e < x_min - 1e-9 || e > x_max + 1e-9) continue;
    svg << "<line x1=\"" << sx(e) << "\" y1=\"" << mt + ph << "\" x2=\""
        << sx(e) << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << sx(e) << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 16
      << "\" text-anchor=\"middle\">estimator queries</text>\n"
      << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
      << ")\">relative inefficiency</text>\n";

  for (const auto& pt : points) {
    const auto it = kColors.find(pt.algorithm);
    const char* color = it != kColors.end() ? it->second : "#999999";
    svg << "<circle cx=\"" << sx(pt.x) << "\" cy=\"" << sy(pt.y)
        << "\" r=\"3.5\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
  }

  double ly = mt + 10;
  for (const char* name : kAlgorithmNames) {
    const auto it = kColors.find(name);
    svg << "<circle cx=\"" << ml + pw + 24 << "\" cy=\"" << ly
        << "\" r=\"4\" fill=\"" << (it != kColors.end() ? it->second : "#999999")
        << "\"/>\n"
        << "<text x=\"" << ml + pw + 34 << "\" y=\"" << ly + 4 << "\">" << name
        << "</text>\n";
    ly += 20;
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

namespace {

/// All simple path prefixes from `s` with 1..max_edges edges that do not pass
/// through `t`, in DFS order over ascending neighbor ids.
std::vector<PathRoute> enumerate_prefixes(const NetworkGraph& g, int s, int t,
                                          int max_edges) {
  std::vector<PathRoute> out;
  PathRoute p;
  p.nodes.push_back(s);
  const auto dfs = [&](auto&& self, const PathRoute& cur) -> void {
    if (cur.edge_count() >= max_edges) return;
    for (const auto& [next, len] : g.neighbors(cur.end())) {
      (void)len;
      if (next == t || cur.contains(next)) continue;
      PathRoute ext = cur.extended(g, next);
      out.push_back(ext);
      self(self, ext);
    }
  };
  dfs(dfs, p);
  return out;
}

struct CachedUtility {
  double skr = 0.0;
  double se = 0.0;
};

}  // namespace

IsotonicityReport isotonicity_scan(const IsotonicityScanConfig& config) {
  config.params.validate();
  if (config.significance <= 0) {
    throw std::invalid_argument("significance must be > 0");
  }
  IsotonicityReport report;

  // --- Witness hunt -------------------------------------------------------
  for (int gi = 0; gi < config.n_graphs; ++gi) {
    auto [raw, graph_seed] =
        suite_graph(config.graph_template, config.n_repeaters, gi,
                    mix_seed(config.master_seed, kWitnessStream), 64);
    const auto [s, t] = raw.end_nodes();
    const NetworkGraph g = prune_to_st_biconnected(raw, s, t);

    QueryCounter counter;
    const SkrEstimator estimator(
        config.params, config.n_samples,
        mix_seed(mix_seed(config.master_seed, kEvalStream),
                 static_cast<std::uint64_t>(gi)),
        &counter);

    const auto prefixes = enumerate_prefixes(g, s, t, config.max_prefix_edges);
    std::map<int, std::vector<const PathRoute*>> by_end;
    for (const auto& p : prefixes) by_end[p.end()].push_back(&p);

    std::map<std::vector<int>, CachedUtility> cache;
    const auto utility = [&](const PathRoute& p) -> CachedUtility {
      auto it = cache.find(p.nodes);
      if (it != cache.end()) return it->second;
      const auto est = estimator.evaluate_route(p);
      const CachedUtility u{est.skr_hz, est.stderr_hz};
      cache.emplace(p.nodes, u);
      return u;
    };
    const auto budget_left = [&] {
      return counter.count() <
             static_cast<std::uint64_t>(config.witness_budget);
    };

    bool found = false;
    for (const auto& [end, group] : by_end) {
      if (found || group.size() < 2) continue;
      for (std::size_t i = 0; i < group.size() && !found; ++i) {
        for (std::size_t j = 0; j < group.size() && !found; ++j) {
          if (i == j) continue;
          const PathRoute& p1 = *group[i];
          const PathRoute& p2 = *group[j];
          for (const auto& [next, len] : g.neighbors(end)) {
            (void)len;
            if (p1.contains(next) || p2.contains(next)) continue;
            if (!budget_left()) break;
            const auto u1 = utility(p1);
            const auto u2 = utility(p2);
            // Looking for p2 ahead of p1 on the prefix...
            const double gap_prefix = u2.skr - u1.skr;
            const double sig_prefix =
                std::hypot(u1.se, u2.se) * config.significance;
            if (!(gap_prefix > sig_prefix && gap_prefix > 0)) continue;
            const auto u1e = utility(p1.extended(g, next));
            const auto u2e = utility(p2.extended(g, next));
            // ...and p1 ahead of p2 once both take the same edge.
            const double gap_ext = u1e.skr - u2e.skr;
            const double sig_ext =
                std::hypot(u1e.se, u2e.se) * config.significance;
            if (!(gap_ext > sig_ext && gap_ext > 0)) continue;
            IsotonicityWitness w;
            w.graph_index = gi;
            w.graph_seed = graph_seed;
            w.p1 = p1.nodes;
            w.p2 = p2.nodes;
            w.extension = next;
            w.skr_p1 = u1.skr;
            w.skr_p2 = u2.skr;
            w.skr_p1e = u1e.skr;
            w.skr_p2e = u2e.skr;
            w.sig_prefix = std::hypot(u1.se, u2.se) > 0
                               ? gap_prefix / std::hypot(u1.se, u2.se)
                               : std::numeric_limits<double>::infinity();
            w.sig_extended = std::hypot(u1e.se, u2e.se) > 0
                                 ? gap_ext / std::hypot(u1e.se, u2e.se)
                                 : std::numeric_limits<double>::infinity();
            report.witnesses.push_back(std::move(w));
            found = true;
            break;
          }
          if (!budget_left()) break;
        }
        if (!budget_left()) break;
      }
      if (!budget_left()) break;
    }
  }

  // --- Utility-landscape grid ---------------------------------------------
  if (config.grid_graphs > 0 && !config.fidelity_grid.empty() &&
      !config.coherence_grid.empty()) {
    for (double fidelity : config.fidelity_grid) {
      for (double coherence : config.coherence_grid) {
        PhysicalParams cell = config.params;
        cell.fidelity = fidelity;
        cell.coherence_time_s = coherence;
        cell.validate();

        std::uint64_t fid_bits = 0, coh_bits = 0;
        std::memcpy(&fid_bits, &fidelity, sizeof fid_bits);
        std::memcpy(&coh_bits, &coherence, sizeof coh_bits);
        const std::uint64_t cell_seed =
            mix_seed(mix_seed(config.master_seed, kGridStream),
                     mix_seed(fid_bits, coh_bits));

        std::vector<double> ineffs;
        ineffs.reserve(static_cast<std::size_t>(config.grid_graphs));
        for (int gi = 0; gi < config.grid_graphs; ++gi) {
          auto [raw, graph_seed] = suite_graph(
              config.graph_template, config.grid_repeaters, gi, cell_seed, 64);
          (void)graph_seed;
          const auto ends = raw.end_nodes();
          const NetworkGraph g =
              prune_to_st_biconnected(raw, ends.first, ends.second);
          const auto [s, t] =
              choose_direction(g, ends.first, ends.second,
                               DirectionHeuristic::Median);

          // One estimator for both algorithms: identical routes then cost
          // identical draws, so the comparison is matched per graph.
          QueryCounter counter;
          const SkrEstimator estimator(
              cell, config.n_samples,
              mix_seed(cell_seed, static_cast<std::uint64_t>(gi)), &counter);
          const auto settled = extended_dijkstra(g, s, t, estimator);
          const auto best_known =
              befs_search(g, s, t, estimator, MeritKind::HeuristicBound, true);
          const double best = std::max(settled.skr_hz, best_known.skr_hz);
          ineffs.push_back(best > 0 ? (best - settled.skr_hz) / best : 0.0);
        }

        IsotonicityGridPoint pt;
        pt.fidelity = fidelity;
        pt.coherence_time_s = coherence;
        pt.n_graphs = config.grid_graphs;
        double sum = 0;
        for (double v : ineffs) sum += v;
        pt.mean_inefficiency = sum / static_cast<double>(ineffs.size());
        double ss = 0;
        for (double v : ineffs) {
          ss += (v - pt.mean_inefficiency) * (v - pt.mean_inefficiency);
        }
        pt.stderr_inefficiency =
            ineffs.size() > 1
                ? std::sqrt(ss / (static_cast<double>(ineffs.size()) - 1.0) /
                            static_cast<double>(ineffs.size()))
                : 0.0;
        report.grid.push_back(pt);
      }
    }
  }
  return report;
}

std::string grid_to_csv(const std::vector<IsotonicityGridPoint>& grid) {
  std::string out =
      "fidelity,coherence_time_s,n_graphs,mean_inefficiency,stderr_inefficiency\n";
  for (const auto& pt : grid) {
    append_double(out, pt.fidelity);
    out.push_back(',');
    append_double(out, pt.coherence_time_s);
    out.push_back(',');
    append_int(out, pt.n_graphs);
    out.push_back(',');
    append_double(out, pt.mean_inefficiency);
    out.push_back(',');
    append_double(out, pt.stderr_inefficiency);
    out.push_back('\n');
  }
  return out;
}

std::string witnesses_to_csv(const std::vector<IsotonicityWitness>& witnesses) {
  std::string out =
      "graph_index,graph_seed,p1,p2,extension,skr_p1,skr_p2,skr_p1e,skr_p2e,"
      "sig_prefix,sig_extended\n";
  for (const auto& w : witnesses) {
    append_int(out, w.graph_index);
    out.push_back(',');
    append_u64(out, w.graph_seed);
    out.push_back(',');
    append_route(out, w.p1);
    out.push_back(',');
    append_route(out, w.p2);
    out.push_back(',');
    append_int(out, w.extension);
    out.push_back(',');
    append_double(out, w.skr_p1);
    out.push_back(',');
    append_double(out, w.skr_p2);
    out.push_back(',');
    append_double(out, w.skr_p1e);
    out.push_back(',');
    append_double(out, w.skr_p2e);
    out.push_back(',');
    append_double(out, w.sig_prefix);
    out.push_back(',');
    append_double(out, w.sig_extended);
    out.push_back('\n');
  }
  return out;
}

}  // namespace qroute
