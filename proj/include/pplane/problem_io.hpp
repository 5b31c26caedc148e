#pragma once

#include <filesystem>
#include <string>

#include "nlohmann/json.hpp"
#include "pplane/astar.hpp"
#include "pplane/geometry.hpp"
#include "pplane/gomlp.hpp"
#include "pplane/multilayer.hpp"

namespace pplane {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "pplane/1";

/// Parse a problem document: {board: {width, height}, grid_resolution,
/// nets: [{label, pins: [[x, y], ...]}, ...]} with physical coordinates,
/// normalized on load. Throws InputError with field context on malformed
/// input.
Problem problem_from_json(const Json& doc);
Problem load_problem(const std::filesystem::path& path);

/// Serialize with the original physical coordinates, so
/// problem_from_json(problem_to_json(p)) == p exactly.
Json problem_to_json(const Problem& problem);
void save_problem(const Problem& problem, const std::filesystem::path& path);

Json grid_to_json(const Grid& grid);
Grid grid_from_json(const Json& doc);

Json dendrogram_to_json(const Dendrogram& dendrogram);

/// Result documents. Every document echoes the problem, the full config and
/// all seeds; wall-clock values live under "timings" so reproducibility
/// checks can mask them.
Json gomlp_result_to_json(const Problem& problem, const GomlpResult& result,
                          const GaConfig& ga, const TrainConfig& train,
                          const SolveOptions& options, bool mlp_only);
Json astar_result_to_json(const Problem& problem, const AstarResult& result,
                          int graph_resolution, std::uint64_t seed);
Json multilayer_result_to_json(const Problem& problem, const MultilayerResult& result,
                               const MultilayerOptions& options, const GaConfig& ga,
                               const TrainConfig& train);

void write_json(const Json& doc, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

/// The document with its "timings" objects replaced by a fixed marker, for
/// byte-stable comparison of repeated runs.
std::string masked_document(const Json& doc);

}  // namespace pplane
