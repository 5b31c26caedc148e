#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pplane/astar.hpp"
#include "pplane/benchmark.hpp"
#include "pplane/gomlp.hpp"
#include "pplane/multilayer.hpp"
#include "pplane/problem_io.hpp"
#include "pplane/render_svg.hpp"
#include "pplane/synthetic.hpp"

namespace fs = std::filesystem;
using namespace pplane;

namespace {

void emit(const Json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json(doc, out_path);
  }
}

int run_solve_gomlp(const std::string& problem_path, std::uint64_t seed, int generations,
                    int population, int elite, int grid, double budget,
                    bool no_feature_expansion, bool no_distance_terms, bool snapshots,
                    bool mlp_only, int workers, const std::string& out_path) {
  Problem problem = load_problem(problem_path);
  if (grid > 0) problem.grid_resolution = grid;

  GaConfig ga;
  ga.generations = generations;
  ga.population_size = population;
  ga.elite_size = elite;
  TrainConfig train_cfg;
  SolveOptions options;
  options.seed = seed;
  options.time_budget_seconds = budget;
  options.workers = workers;
  options.snapshots = snapshots;
  options.feature_expansion = !no_feature_expansion;
  options.distance_terms = !no_distance_terms;

  const GomlpResult result = mlp_only ? solve_mlp_only(problem, train_cfg, options)
                                      : solve(problem, ga, train_cfg, options);
  emit(gomlp_result_to_json(problem, result, ga, train_cfg, options, mlp_only), out_path);
  return 0;
}

int run_solve_astar(const std::string& problem_path, int grid, std::uint64_t seed,
                    const std::string& out_path) {
  Problem problem = load_problem(problem_path);
  if (grid > 0) problem.grid_resolution = grid;
  const AstarResult result = solve_astar(problem);
  emit(astar_result_to_json(problem, result, problem.grid_resolution, seed), out_path);
  return 0;
}

int run_solve_multilayer(const std::string& problem_path, const std::string& metric,
                         int layers, bool auto_mcdl, const std::string& linkage,
                         std::uint64_t seed, double budget, int workers, int generations,
                         int population, int elite, const std::string& out_path) {
  Problem problem = load_problem(problem_path);

  MultilayerOptions options;
  options.metric = metric == "emd" ? NetMetric::EMD : NetMetric::HD;
  options.linkage = linkage == "single"
                        ? Linkage::Single
                        : (linkage == "complete" ? Linkage::Complete : Linkage::Average);
  if (!auto_mcdl) {
    if (layers <= 0) {
      throw CLI::ValidationError("--layers K or --auto-mcdl is required");
    }
    options.layer_count = layers;
  }
  options.seed = seed;
  options.per_layer_budget_seconds = budget;
  options.workers = workers;

  GaConfig ga;
  ga.generations = generations;
  ga.population_size = population;
  ga.elite_size = elite;
  TrainConfig train_cfg;

  const MultilayerResult result = solve_multilayer(problem, options, ga, train_cfg);
  emit(multilayer_result_to_json(problem, result, options, ga, train_cfg), out_path);
  return 0;
}

int run_gen_problems(const std::string& nets, int count, double interleave,
                     std::uint64_t seed, const std::string& out_dir, int pins_min,
                     int pins_max, double spread, int grid) {
  // --nets accepts "6" or a "6-8" sweep cycled across the generated set.
  int nets_lo = 0, nets_hi = 0;
  const auto dash = nets.find('-');
  if (dash == std::string::npos) {
    nets_lo = nets_hi = std::stoi(nets);
  } else {
    nets_lo = std::stoi(nets.substr(0, dash));
    nets_hi = std::stoi(nets.substr(dash + 1));
  }
  if (nets_lo < 2 || nets_hi < nets_lo) {
    throw InputError("invalid --nets range: " + nets);
  }

  fs::create_directories(out_dir);
  for (int i = 0; i < count; ++i) {
    SyntheticSpec spec;
    spec.net_count = nets_lo + (nets_hi > nets_lo ? i % (nets_hi - nets_lo + 1) : 0);
    spec.pins_per_net_min = pins_min;
    spec.pins_per_net_max = pins_max;
    spec.cluster_spread = spread;
    spec.interleave_factor = interleave;
    spec.rng_seed = seed;
    spec.grid_resolution = grid;
    const Problem problem = generate_problem(spec, i);
    char name[32];
    std::snprintf(name, sizeof(name), "problem_%03d.json", i);
    save_problem(problem, fs::path(out_dir) / name);
  }
  std::cout << "wrote " << count << " problems to " << out_dir << '\n';
  return 0;
}

int run_bench(const std::string& suite_dir, double budget, const std::string& report_path,
              std::uint64_t seed, int problem_workers, int generations, int population,
              int elite) {
  std::vector<std::pair<std::string, Problem>> problems;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(suite_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .json problems in " + suite_dir);
  for (const auto& file : files) {
    problems.emplace_back(file.filename().string(), load_problem(file));
  }

  BenchmarkConfig config;
  config.ga.generations = generations;
  config.ga.population_size = population;
  config.ga.elite_size = elite;
  config.per_problem_budget_seconds = budget;
  config.seed = seed;
  config.problem_workers = problem_workers;

  const BenchmarkReport report = run_benchmark(problems, config);
  const Json doc = benchmark_report_to_json(report, config);
  if (report_path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json(doc, report_path);
  }
  std::cerr << "win-or-tie rate " << report.win_or_tie_rate << " over "
            << (report.wins + report.ties + report.losses) << " problems (sign test p = "
            << report.sign_test_p << ")\n";
  return 0;
}

int run_render(const std::string& result_path, const std::string& out_path) {
  const Json doc = read_json(result_path);
  const std::string kind = doc.value("kind", "");
  const fs::path out(out_path);

  if (kind == "gomlp-result" || kind == "mlp-result" || kind == "astar-result") {
    const Problem problem = problem_from_json(doc.at("problem"));
    const Grid grid = grid_from_json(doc.at("partition"));
    const Partition partition = make_partition(grid, problem.net_count());
    RenderOptions options;
    if (doc.contains("best_chromosome") && doc["best_chromosome"].is_array() &&
        !doc["best_chromosome"].empty()) {
      options.show_handles = true;
      options.handles = doc["best_chromosome"].get<Chromosome>();
      options.handles_per_net =
          static_cast<int>(options.handles.size() / (2 * problem.nets.size()));
    }
    render_partition(problem, partition, out, options);
    if (doc.contains("snapshots")) {
      int index = 0;
      for (const auto& snap : doc["snapshots"]) {
        const Grid snap_grid = grid_from_json(snap.at("partition"));
        const Partition snap_partition = make_partition(snap_grid, problem.net_count());
        fs::path snap_path = out;
        snap_path.replace_extension("");
        snap_path += "_gen" + std::to_string(snap["generation"].get<int>()) + ".svg";
        render_partition(problem, snap_partition, snap_path);
        ++index;
      }
      std::cerr << "rendered " << index << " snapshot frames\n";
    }
    return 0;
  }

  if (kind == "multilayer-result") {
    const Problem problem = problem_from_json(doc.at("problem"));
    Dendrogram dendro;
    for (const auto& leaf : doc.at("dendrogram").at("leaves")) {
      dendro.leaves.push_back(leaf.get<int>());
    }
    for (const auto& merge : doc.at("dendrogram").at("merges")) {
      dendro.merges.push_back(
          {merge[0].get<int>(), merge[1].get<int>(), merge[2].get<double>()});
    }
    std::vector<std::string> labels;
    for (int id : dendro.leaves) {
      labels.push_back(problem.nets[static_cast<std::size_t>(id - 1)].label);
    }
    fs::path dendro_path = out;
    dendro_path.replace_extension("");
    dendro_path += "_dendrogram.svg";
    render_dendrogram(dendro, labels, dendro_path);

    for (const auto& layer : doc.at("layer_results")) {
      // Rebuild the layer subproblem for pins and labels.
      Problem sub;
      sub.board_width = problem.board_width;
      sub.board_height = problem.board_height;
      sub.grid_resolution = layer.at("partition").at("resolution").get<int>();
      for (const auto& id : layer.at("net_ids")) {
        Net net = problem.nets[static_cast<std::size_t>(id.get<int>() - 1)];
        net.id = static_cast<int>(sub.nets.size()) + 1;
        sub.nets.push_back(std::move(net));
      }
      const Grid grid = grid_from_json(layer.at("partition"));
      const Partition partition = make_partition(grid, sub.net_count());
      fs::path layer_path = out;
      layer_path.replace_extension("");
      layer_path += "_layer" + std::to_string(layer.at("layer").get<int>()) + ".svg";
      render_partition(sub, partition, layer_path);
    }
    return 0;
  }

  throw InputError("cannot render document of kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-plane generation toolkit: GOMLP solver, A* baseline, multilayer "
               "extension, synthetic benchmarks and SVG rendering"};
  app.require_subcommand(1);

  std::string problem_path, out_path, suite_dir, report_path, result_path, out_dir;
  std::uint64_t seed = 0;
  int generations = 20, population = 30, elite = 10, grid = 0, workers = 0;
  double budget = 60.0;
  bool no_feature_expansion = false, no_distance_terms = false, snapshots = false,
       mlp_only = false;

  auto* solve_gomlp_cmd =
      app.add_subcommand("solve-gomlp", "Evolve handle placements over an inner MLP");
  solve_gomlp_cmd->add_option("problem", problem_path, "problem JSON file")->required();
  solve_gomlp_cmd->add_option("--seed", seed, "run seed");
  solve_gomlp_cmd->add_option("--generations", generations, "evolution steps");
  solve_gomlp_cmd->add_option("--population", population, "population size");
  solve_gomlp_cmd->add_option("--elite", elite, "elite size");
  solve_gomlp_cmd->add_option("--grid", grid, "override grid resolution");
  solve_gomlp_cmd->add_option("--budget", budget, "time budget, seconds");
  solve_gomlp_cmd->add_flag("--no-feature-expansion", no_feature_expansion,
                            "raw (x, y) MLP input");
  solve_gomlp_cmd->add_flag("--no-distance-terms", no_distance_terms,
                            "island-count-only fitness");
  solve_gomlp_cmd->add_flag("--snapshots", snapshots, "store elite partition per generation");
  solve_gomlp_cmd->add_flag("--mlp-only", mlp_only, "single MLP on pins, no evolution");
  solve_gomlp_cmd->add_option("--workers", workers, "evaluation threads (0 = auto)");
  solve_gomlp_cmd->add_option("--out", out_path, "result document path (default stdout)");

  int astar_grid = 0;
  auto* solve_astar_cmd = app.add_subcommand("solve-astar", "MST + A* baseline pipeline");
  solve_astar_cmd->add_option("problem", problem_path, "problem JSON file")->required();
  solve_astar_cmd->add_option("--grid", astar_grid, "override grid resolution");
  solve_astar_cmd->add_option("--seed", seed, "echoed in the result document");
  solve_astar_cmd->add_option("--out", out_path, "result document path (default stdout)");

  std::string metric = "hd", linkage = "avg";
  int layers = 0;
  bool auto_mcdl = false;
  auto* multilayer_cmd =
      app.add_subcommand("solve-multilayer", "Layer assignment plus per-layer GOMLP");
  multilayer_cmd->add_option("problem", problem_path, "problem JSON file")->required();
  multilayer_cmd->add_option("--metric", metric, "hd|emd")
      ->check(CLI::IsMember({"hd", "emd"}));
  auto* layers_opt = multilayer_cmd->add_option("--layers", layers, "layer count K");
  auto* mcdl_flag =
      multilayer_cmd->add_flag("--auto-mcdl", auto_mcdl, "search the smallest all-zero-EI K");
  layers_opt->excludes(mcdl_flag);
  multilayer_cmd->add_option("--linkage", linkage, "avg|single|complete")
      ->check(CLI::IsMember({"avg", "single", "complete"}));
  multilayer_cmd->add_option("--seed", seed, "run seed");
  multilayer_cmd->add_option("--budget", budget, "per-layer budget, seconds");
  multilayer_cmd->add_option("--workers", workers, "concurrent layers (0 = auto)");
  multilayer_cmd->add_option("--generations", generations, "GOMLP evolution steps");
  multilayer_cmd->add_option("--population", population, "GOMLP population size");
  multilayer_cmd->add_option("--elite", elite, "GOMLP elite size");
  multilayer_cmd->add_option("--out", out_path, "result document path (default stdout)");

  std::string nets = "5";
  int count = 10, pins_min = 3, pins_max = 6, gen_grid = 100;
  double interleave = 0.3, spread = 0.035;
  auto* gen_cmd = app.add_subcommand("gen-problems", "Generate a synthetic problem suite");
  gen_cmd->add_option("--nets", nets, "net count or range, e.g. 6 or 6-8");
  gen_cmd->add_option("--count", count, "number of problems");
  gen_cmd->add_option("--interleave", interleave, "difficulty in [0, 1]");
  gen_cmd->add_option("--seed", seed, "generator seed");
  gen_cmd->add_option("--out-dir", out_dir, "output directory")->required();
  gen_cmd->add_option("--pins-min", pins_min, "min pins per net");
  gen_cmd->add_option("--pins-max", pins_max, "max pins per net");
  gen_cmd->add_option("--spread", spread, "cluster spread, normalized units");
  gen_cmd->add_option("--grid", gen_grid, "grid resolution");

  int bench_workers = 1;
  auto* bench_cmd =
      app.add_subcommand("bench", "Paired GOMLP vs A* comparison over a suite");
  bench_cmd->add_option("--suite-dir", suite_dir, "directory of problem JSON files")
      ->required();
  bench_cmd->add_option("--budget", budget, "per-problem budget, seconds");
  bench_cmd->add_option("--report", report_path, "report path (default stdout)");
  bench_cmd->add_option("--seed", seed, "benchmark seed");
  bench_cmd->add_option("--workers", bench_workers, "concurrent problems");
  bench_cmd->add_option("--generations", generations, "GOMLP evolution steps");
  bench_cmd->add_option("--population", population, "GOMLP population size");
  bench_cmd->add_option("--elite", elite, "GOMLP elite size");

  auto* render_cmd = app.add_subcommand("render", "SVG from a result document");
  render_cmd->add_option("--result", result_path, "result document")->required();
  render_cmd->add_option("--out", out_path, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve_gomlp_cmd->parsed()) {
      return run_solve_gomlp(problem_path, seed, generations, population, elite, grid,
                             budget, no_feature_expansion, no_distance_terms, snapshots,
                             mlp_only, workers, out_path);
    }
    if (solve_astar_cmd->parsed()) {
      return run_solve_astar(problem_path, astar_grid, seed, out_path);
    }
    if (multilayer_cmd->parsed()) {
      return run_solve_multilayer(problem_path, metric, layers, auto_mcdl, linkage, seed,
                                  budget, workers, generations, population, elite, out_path);
    }
    if (gen_cmd->parsed()) {
      return run_gen_problems(nets, count, interleave, seed, out_dir, pins_min, pins_max,
                              spread, gen_grid);
    }
    if (bench_cmd->parsed()) {
      return run_bench(suite_dir, budget, report_path, seed, bench_workers, generations,
                       population, elite);
    }
    if (render_cmd->parsed()) {
      return run_render(result_path, out_path);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
