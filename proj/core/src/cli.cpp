#include "qroute/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qroute/bench.hpp"

namespace qroute {

namespace {

/// Argument problems detected after CLI11 parsing; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flags shared by every command that evaluates key rates.
struct PhysicsArgs {
  double fidelity = 0.96;
  double coherence_time_s = 10.0;  // std::stod accepts "inf"
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  bool no_prune = false;
  std::string direction = "median";

  void attach(CLI::App* cmd) {
    cmd->add_option("--fidelity", fidelity, "initial pair fidelity, in (0.25, 1]")
        ->capture_default_str();
    cmd->add_option("--coherence-time", coherence_time_s,
                    "memory coherence time in seconds ('inf' disables dephasing)")
        ->capture_default_str();
    cmd->add_option("--samples", samples, "Monte-Carlo samples per estimate")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    cmd->add_flag("--no-prune", no_prune,
                  "skip removing edges that lie on no source-target path");
    cmd->add_option("--direction", direction, "search direction heuristic")
        ->check(CLI::IsMember({"mean", "median", "none"}))
        ->capture_default_str();
  }

  PhysicalParams params() const {
    PhysicalParams p;
    p.fidelity = fidelity;
    p.coherence_time_s = coherence_time_s;
    return p;
  }

  DirectionHeuristic heuristic() const {
    if (direction == "mean") return DirectionHeuristic::Mean;
    if (direction == "none") return DirectionHeuristic::None;
    return DirectionHeuristic::Median;
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  if (!parts.empty() && parts.back().empty()) parts.pop_back();
  return parts;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& part : split_list(text)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad ") + what + " entry: '" + part + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " list is empty");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& part : split_list(text)) {
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad ") + what + " entry: '" + part + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " list is empty");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

// ---------------------------------------------------------------------------

struct GenArgs {
  GraphGenConfig cfg;
  std::string out;
};

void run_gen(const GenArgs& args) {
  const NetworkGraph g = waxman_generate(args.cfg);
  emit(args.out, graph_to_json(g) + "\n");
}

struct FindArgs {
  std::string graph_path;
  std::string algorithm = "befs-heuristic";
  int source = -1;  // -1 = use the end nodes
  int target = -1;
  PhysicsArgs physics;
  SaConfig sa;
  GaConfig ga;
};

void run_find(const FindArgs& args) {
  const NetworkGraph loaded = load_graph(args.graph_path);
  int s = args.source;
  int t = args.target;
  if (s < 0 || t < 0) {
    const auto ends = loaded.end_nodes();
    if (s < 0) s = ends.first;
    if (t < 0) t = ends.second;
  }
  if (s == t) throw UsageError("source and target must differ");
  if (s >= loaded.node_count() || t >= loaded.node_count()) {
    throw UsageError("source/target out of range");
  }

  const NetworkGraph g = args.physics.no_prune
                             ? loaded
                             : prune_to_st_biconnected(loaded, s, t);
  const auto [ds, dt] = choose_direction(g, s, t, args.physics.heuristic());
  const bool reversed = ds != s;

  AlgorithmSpec spec;
  spec.name = args.algorithm;
  spec.sa = args.sa;
  spec.ga = args.ga;

  const auto start = std::chrono::steady_clock::now();
  SearchResult result = run_algorithm(g, ds, dt, spec, args.physics.params(),
                                      args.physics.samples, args.physics.seed);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();

  std::vector<int> route = std::move(result.route.nodes);
  if (reversed) std::reverse(route.begin(), route.end());

  nlohmann::json out;
  out["route"] = route;
  out["skr_hz"] = result.skr_hz;
  out["stderr_hz"] = result.stderr_hz;
  out["queries"] = result.queries;
  out["wall_time_ms"] = wall_ms;
  std::cout << out.dump(2) << "\n";
}

struct BenchArgs {
  std::string repeaters;
  int graphs_per_count = 10;
  std::string algorithms;
  std::string out;
  std::string svg;
  int workers = 1;
  bool no_wall_time = false;
  GraphGenConfig tmpl;
  PhysicsArgs physics;
  SaConfig sa;
  GaConfig ga;
};

void run_bench(const BenchArgs& args) {
  SuiteConfig cfg;
  cfg.repeater_counts = parse_int_list(args.repeaters, "--repeaters");
  cfg.graphs_per_count = args.graphs_per_count;
  cfg.graph_template = args.tmpl;
  cfg.params = args.physics.params();
  cfg.n_samples = args.physics.samples;
  cfg.master_seed = args.physics.seed;
  cfg.prune = !args.physics.no_prune;
  cfg.direction = args.physics.heuristic();
  cfg.workers = args.workers;
  cfg.record_wall_time = !args.no_wall_time;
  for (const auto& name : split_list(args.algorithms)) {
    AlgorithmSpec spec;
    spec.name = name;
    spec.sa = args.sa;
    spec.ga = args.ga;
    cfg.algorithms.push_back(std::move(spec));
  }
  if (cfg.algorithms.empty()) throw UsageError("--algorithms list is empty");
  for (const auto& a : cfg.algorithms) {
    if (std::none_of(std::begin(kAlgorithmNames), std::end(kAlgorithmNames),
                     [&](const char* n) { return a.name == n; })) {
      throw UsageError("unknown algorithm: '" + a.name + "'");
    }
  }

  const auto records = run_suite(cfg);
  emit(args.out, records_to_csv(records));
  if (!args.svg.empty()) write_text(args.svg, svg_scatter(records));
}

struct ScanArgs {
  int graphs = 100;
  int repeaters = 8;
  int grid_graphs = 0;
  int grid_repeaters = 25;
  std::string fidelity_grid;
  std::string coherence_grid;
  std::string out;
  std::string witnesses_out;
  GraphGenConfig tmpl;
  PhysicsArgs physics;
};

void run_scan(const ScanArgs& args) {
  IsotonicityScanConfig cfg;
  cfg.n_graphs = args.graphs;
  cfg.n_repeaters = args.repeaters;
  cfg.graph_template = args.tmpl;
  cfg.params = args.physics.params();
  cfg.n_samples = args.physics.samples;
  cfg.master_seed = args.physics.seed;
  cfg.grid_graphs = args.grid_graphs;
  cfg.grid_repeaters = args.grid_repeaters;
  if (!args.fidelity_grid.empty()) {
    cfg.fidelity_grid = parse_double_list(args.fidelity_grid, "--fidelity-grid");
  }
  if (!args.coherence_grid.empty()) {
    cfg.coherence_grid =
        parse_double_list(args.coherence_grid, "--coherence-grid");
  }

  const auto report = isotonicity_scan(cfg);
  std::cout << "witnesses: " << report.witnesses.size() << " of " << args.graphs
            << " graphs\n";
  if (!args.witnesses_out.empty()) {
    write_text(args.witnesses_out, witnesses_to_csv(report.witnesses));
  }
  if (!report.grid.empty()) emit(args.out, grid_to_csv(report.grid));
}

void attach_graph_template(CLI::App* cmd, GraphGenConfig& cfg) {
  cmd->add_option("--side", cfg.side, "placement square side, km")
      ->capture_default_str();
  cmd->add_option("--alpha", cfg.waxman_alpha, "edge locality strength")
      ->capture_default_str();
  cmd->add_option("--beta", cfg.waxman_beta, "edge density")
      ->capture_default_str();
  cmd->add_option("--scale", cfg.waxman_scale, "distance normalization, km")
      ->capture_default_str();
}

void attach_metaheuristic_flags(CLI::App* cmd, SaConfig& sa, GaConfig& ga) {
  cmd->add_option("--sa-steps", sa.n_steps, "annealing mutation steps")
      ->capture_default_str();
  cmd->add_option("--sa-penalty", sa.length_penalty,
                  "per-edge penalty for zero-rate paths")
      ->capture_default_str();
  cmd->add_option("--sa-theta0", sa.schedule.theta0,
                  "initial annealing temperature")
      ->capture_default_str();
  cmd->add_option("--ga-population", ga.population, "genetic population size")
      ->capture_default_str();
  cmd->add_option("--ga-generations", ga.generations, "genetic generations")
      ->capture_default_str();
  cmd->add_option("--ga-theta", ga.selection_theta,
                  "softmax selection temperature")
      ->capture_default_str();
  cmd->add_option("--ga-mutation-rate", ga.mutation_rate,
                  "per-child mutation probability")
      ->capture_default_str();
}

}  // namespace

int cli_entry(int argc, const char* const* argv) {
  CLI::App app{"Key-rate-aware route search for quantum repeater networks"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a random network graph");
  gen_cmd->add_option("--repeaters", gen.cfg.n_repeaters, "number of repeaters")
      ->required()
      ->check(CLI::NonNegativeNumber);
  attach_graph_template(gen_cmd, gen.cfg);
  gen_cmd->add_option("--seed", gen.cfg.seed, "generation seed")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output JSON path (default stdout)");
  gen_cmd->callback([&] { run_gen(gen); });

  FindArgs find;
  auto* find_cmd = app.add_subcommand("find", "search one graph for the best route");
  find_cmd->add_option("--graph", find.graph_path, "graph JSON path")->required();
  find_cmd
      ->add_option("--algorithm", find.algorithm, "search algorithm")
      ->check(CLI::IsMember(std::vector<std::string>(
          std::begin(kAlgorithmNames), std::end(kAlgorithmNames))))
      ->capture_default_str();
  find_cmd->add_option("--source", find.source, "source node id (default: end node)");
  find_cmd->add_option("--target", find.target, "target node id (default: end node)");
  find.physics.attach(find_cmd);
  attach_metaheuristic_flags(find_cmd, find.sa, find.ga);
  find_cmd->callback([&] { run_find(find); });

  BenchArgs bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "run an algorithm suite over random graphs");
  bench_cmd
      ->add_option("--repeaters", bench.repeaters,
                   "comma-separated repeater counts, e.g. 5,10,25")
      ->required();
  bench_cmd
      ->add_option("--graphs-per-count", bench.graphs_per_count,
                   "instances per repeater count")
      ->capture_default_str();
  bench_cmd->add_option("--algorithms", bench.algorithms,
                        "comma-separated algorithm names");
  bench_cmd->add_option("--out", bench.out, "CSV output path (default stdout)");
  bench_cmd->add_option("--svg", bench.svg, "scatter plot output path");
  bench_cmd->add_flag("--no-wall-time", bench.no_wall_time,
                      "write 0 for wall times; output is then byte-stable across runs");
  bench_cmd->add_option("--workers", bench.workers, "worker threads (0 = all cores)")
      ->capture_default_str();
  attach_graph_template(bench_cmd, bench.tmpl);
  bench.physics.attach(bench_cmd);
  attach_metaheuristic_flags(bench_cmd, bench.sa, bench.ga);
  bench_cmd->callback([&] { run_bench(bench); });

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand(
      "scan", "hunt for utility-ordering reversals and map the landscape");
  scan_cmd->add_option("--graphs", scan.graphs, "witness-search instances")
      ->capture_default_str();
  scan_cmd->add_option("--repeaters", scan.repeaters, "witness-search graph size")
      ->capture_default_str();
  scan_cmd->add_option("--grid-graphs", scan.grid_graphs,
                       "instances per landscape grid cell (0 = no grid)")
      ->capture_default_str();
  scan_cmd->add_option("--grid-repeaters", scan.grid_repeaters,
                       "landscape grid graph size")
      ->capture_default_str();
  scan_cmd->add_option("--fidelity-grid", scan.fidelity_grid,
                       "comma-separated fidelities for the landscape grid");
  scan_cmd->add_option("--coherence-grid", scan.coherence_grid,
                       "comma-separated coherence times for the landscape grid");
  scan_cmd->add_option("--out", scan.out, "grid CSV output path (default stdout)");
  scan_cmd->add_option("--witnesses-out", scan.witnesses_out,
                       "witness CSV output path");
  attach_graph_template(scan_cmd, scan.tmpl);
  scan.physics.attach(scan_cmd);
  scan_cmd->callback([&] { run_scan(scan); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message; exit code normalized below
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace qroute
