#include "pplane/problem_io.hpp"

#include <fstream>
#include <sstream>

namespace pplane {

namespace {

const Json& require_field(const Json& doc, const char* name, const char* where) {
  const auto it = doc.find(name);
  if (it == doc.end()) {
    throw InputError(std::string("missing field '") + name + "' in " + where);
  }
  return *it;
}

double require_number(const Json& value, const char* what) {
  if (!value.is_number()) {
    throw InputError(std::string(what) + " must be a number, got " + value.dump());
  }
  return value.get<double>();
}

Json config_json(const GaConfig& ga) {
  return Json{{"population_size", ga.population_size},
              {"generations", ga.generations},
              {"elite_size", ga.elite_size},
              {"mutation_rate", ga.mutation_rate},
              {"crossover_swap_probability", ga.crossover_swap_probability},
              {"rng_seed", ga.rng_seed}};
}

Json config_json(const TrainConfig& train) {
  return Json{{"learning_rate", train.learning_rate},
              {"max_epochs", train.max_epochs},
              {"adam_beta1", train.adam_beta1},
              {"adam_beta2", train.adam_beta2},
              {"adam_epsilon", train.adam_epsilon},
              {"early_stop_on_full_accuracy", train.early_stop_on_full_accuracy}};
}

Json breakdown_json(const FitnessBreakdown& fb) {
  return Json{{"f_island", fb.f_island},
              {"f_dmin", fb.f_dmin},
              {"f_dcent", fb.f_dcent},
              {"feasibility_penalty", fb.feasibility_penalty},
              {"total", fb.total}};
}

Json history_json(const std::vector<GenerationStats>& history) {
  Json rows = Json::array();
  for (const auto& gs : history) {
    rows.push_back(Json::array({gs.best_fitness, gs.mean_fitness}));
  }
  return rows;
}

Json gomlp_metrics_json(const GomlpResult& result) {
  return Json{{"ei", result.ei},
              {"feasible", result.feasible},
              {"timed_out", result.timed_out},
              {"generations_evaluated", result.generations_evaluated},
              {"best_fitness", result.best_breakdown.total},
              {"fitness_breakdown", breakdown_json(result.best_breakdown)},
              {"fitness_history", history_json(result.fitness_history)}};
}

}  // namespace

Problem problem_from_json(const Json& doc) {
  if (!doc.is_object()) throw InputError("problem document must be a JSON object");
  const Json& board = require_field(doc, "board", "problem document");
  const double width = require_number(require_field(board, "width", "board"), "board.width");
  const double height =
      require_number(require_field(board, "height", "board"), "board.height");
  int resolution = 100;
  if (const auto it = doc.find("grid_resolution"); it != doc.end()) {
    if (!it->is_number_integer()) throw InputError("grid_resolution must be an integer");
    resolution = it->get<int>();
  }

  const Json& nets = require_field(doc, "nets", "problem document");
  if (!nets.is_array() || nets.empty()) {
    throw InputError("'nets' must be a nonempty array");
  }
  std::vector<RawNet> raw;
  raw.reserve(nets.size());
  int index = 0;
  for (const auto& net : nets) {
    ++index;
    RawNet rn;
    if (const auto it = net.find("label"); it != net.end() && it->is_string()) {
      rn.label = it->get<std::string>();
    }
    const std::string where = "net #" + std::to_string(index) +
                              (rn.label.empty() ? "" : " ('" + rn.label + "')");
    const Json& pins = require_field(net, "pins", where.c_str());
    if (!pins.is_array() || pins.empty()) {
      throw InputError("'pins' of " + where + " must be a nonempty array");
    }
    for (const auto& pin : pins) {
      if (!pin.is_array() || pin.size() != 2) {
        throw InputError("each pin of " + where + " must be an [x, y] pair, got " +
                         pin.dump());
      }
      rn.pins.emplace_back(require_number(pin[0], "pin x"), require_number(pin[1], "pin y"));
    }
    raw.push_back(std::move(rn));
  }
  return normalize_problem(raw, width, height, resolution);
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file: " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("parse error in " + path.string() + ": " + e.what());
  }
  try {
    return problem_from_json(doc);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Json problem_to_json(const Problem& problem) {
  Json nets = Json::array();
  for (const auto& net : problem.nets) {
    Json pins = Json::array();
    for (const auto& pin : net.pins) {
      pins.push_back(Json::array({pin.raw_x, pin.raw_y}));
    }
    nets.push_back(Json{{"label", net.label}, {"pins", pins}});
  }
  return Json{{"board", Json{{"width", problem.board_width}, {"height", problem.board_height}}},
              {"grid_resolution", problem.grid_resolution},
              {"nets", nets}};
}

void save_problem(const Problem& problem, const std::filesystem::path& path) {
  write_json(problem_to_json(problem), path);
}

Json grid_to_json(const Grid& grid) {
  Json rows = Json::array();
  for (int r = 0; r < grid.resolution; ++r) {
    Json row = Json::array();
    for (int c = 0; c < grid.resolution; ++c) row.push_back(grid.at(r, c));
    rows.push_back(std::move(row));
  }
  return Json{{"resolution", grid.resolution}, {"labels", rows}};
}

Grid grid_from_json(const Json& doc) {
  const int resolution = require_field(doc, "resolution", "partition").get<int>();
  Grid grid(resolution, 0);
  const Json& rows = require_field(doc, "labels", "partition");
  if (static_cast<int>(rows.size()) != resolution) {
    throw InputError("partition labels row count mismatch");
  }
  for (int r = 0; r < resolution; ++r) {
    const Json& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != resolution) {
      throw InputError("partition labels column count mismatch at row " + std::to_string(r));
    }
    for (int c = 0; c < resolution; ++c) grid.at(r, c) = row[static_cast<std::size_t>(c)].get<int>();
  }
  return grid;
}

Json dendrogram_to_json(const Dendrogram& dendrogram) {
  Json merges = Json::array();
  for (const auto& m : dendrogram.merges) {
    merges.push_back(Json::array({m.a, m.b, m.height}));
  }
  return Json{{"leaves", dendrogram.leaves}, {"merges", merges}};
}

Json gomlp_result_to_json(const Problem& problem, const GomlpResult& result,
                          const GaConfig& ga, const TrainConfig& train,
                          const SolveOptions& options, bool mlp_only) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = mlp_only ? "mlp-result" : "gomlp-result";
  doc["problem"] = problem_to_json(problem);
  doc["config"] = Json{{"seed", options.seed},
                       {"time_budget_seconds", options.time_budget_seconds},
                       {"feature_expansion", options.feature_expansion},
                       {"distance_terms", options.distance_terms},
                       {"snapshots", options.snapshots},
                       {"ga", config_json(ga)},
                       {"train", config_json(train)}};
  doc["metrics"] = gomlp_metrics_json(result);
  doc["partition"] = grid_to_json(result.best_partition.grid);
  doc["best_chromosome"] = result.best_chromosome;
  if (!result.snapshots.empty()) {
    Json snaps = Json::array();
    for (const auto& [generation, partition] : result.snapshots) {
      snaps.push_back(
          Json{{"generation", generation}, {"partition", grid_to_json(partition.grid)}});
    }
    doc["snapshots"] = std::move(snaps);
  }
  doc["timings"] = Json{{"wall_time_seconds", result.wall_time_seconds}};
  return doc;
}

Json astar_result_to_json(const Problem& problem, const AstarResult& result,
                          int graph_resolution, std::uint64_t seed) {
  Json attempts = Json::array();
  for (const auto& a : result.report.attempts) {
    attempts.push_back(Json{
        {"net_id", a.net_id}, {"connected", a.connected}, {"path_cost", a.path_cost}});
  }
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "astar-result";
  doc["problem"] = problem_to_json(problem);
  doc["config"] = Json{{"seed", seed},
                       {"graph_resolution", graph_resolution > 0
                                                ? graph_resolution
                                                : problem.grid_resolution}};
  doc["metrics"] = Json{{"ei", result.ei},
                        {"feasible", result.feasible},
                        {"all_connected", result.report.all_connected()},
                        {"failed_pairs", result.report.failures()},
                        {"connection_attempts", attempts}};
  doc["partition"] = grid_to_json(result.partition.grid);
  doc["timings"] = Json{{"wall_time_seconds", result.wall_time_seconds}};
  return doc;
}

Json multilayer_result_to_json(const Problem& problem, const MultilayerResult& result,
                               const MultilayerOptions& options, const GaConfig& ga,
                               const TrainConfig& train) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "multilayer-result";
  doc["problem"] = problem_to_json(problem);
  doc["config"] =
      Json{{"seed", options.seed},
           {"metric", options.metric == NetMetric::HD ? "hd" : "emd"},
           {"linkage", options.linkage == Linkage::Average
                           ? "avg"
                           : (options.linkage == Linkage::Single ? "single" : "complete")},
           {"layers", options.layer_count.has_value() ? Json(*options.layer_count) : Json()},
           {"auto_mcdl", !options.layer_count.has_value()},
           {"per_layer_budget_seconds", options.per_layer_budget_seconds},
           {"ga", config_json(ga)},
           {"train", config_json(train)}};

  Json matrix = Json::array();
  for (int i = 0; i < result.distances.size; ++i) {
    Json row = Json::array();
    for (int j = 0; j < result.distances.size; ++j) row.push_back(result.distances.at(i, j));
    matrix.push_back(std::move(row));
  }
  doc["distances"] = std::move(matrix);
  doc["dendrogram"] = dendrogram_to_json(result.dendrogram);

  Json assignment = Json::object();
  for (std::size_t leaf = 0; leaf < result.assignment.size(); ++leaf) {
    assignment[std::to_string(result.dendrogram.leaves[leaf])] = result.assignment[leaf];
  }
  doc["assignment"] = std::move(assignment);
  doc["layers_used"] = result.layers_used;
  if (result.mcdl_search) {
    doc["mcdl"] = Json{{"determined", result.mcdl_determined},
                       {"value", result.mcdl}};
    Json trials = Json::array();
    for (const auto& trial : result.trials) {
      trials.push_back(Json{{"layers", trial.layer_count},
                            {"layer_ei", trial.layer_ei},
                            {"layer_feasible", trial.layer_feasible},
                            {"all_desirable", trial.all_desirable}});
    }
    doc["mcdl"]["trials"] = std::move(trials);
  }

  Json layers = Json::array();
  for (const auto& ls : result.layer_results) {
    Json layer;
    layer["layer"] = ls.layer;
    layer["net_ids"] = ls.net_ids;
    layer["metrics"] = gomlp_metrics_json(ls.result);
    layer["partition"] = grid_to_json(ls.result.best_partition.grid);
    layers.push_back(std::move(layer));
  }
  doc["layer_results"] = std::move(layers);
  doc["timings"] = Json{{"wall_time_seconds", result.wall_time_seconds}};
  return doc;
}

void write_json(const Json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write to " + path.string());
  out << doc.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("parse error in " + path.string() + ": " + e.what());
  }
}

namespace {
void mask_timings(Json& node) {
  if (node.is_object()) {
    for (auto& [key, value] : node.items()) {
      if (key == "timings" || key == "wall_time_seconds" || key == "wall_time_gomlp" ||
          key == "wall_time_astar") {
        value = "masked";
      } else {
        mask_timings(value);
      }
    }
  } else if (node.is_array()) {
    for (auto& value : node) mask_timings(value);
  }
}
}  // namespace

std::string masked_document(const Json& doc) {
  Json copy = doc;
  mask_timings(copy);
  return copy.dump(2);
}

}  // namespace pplane
