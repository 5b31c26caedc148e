#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pplane/genopt.hpp"
#include "pplane/geometry.hpp"
#include "pplane/gomlp.hpp"
#include "pplane/neural.hpp"

namespace pplane {

enum class NetMetric { HD, EMD };
enum class Linkage { Average, Single, Complete };

/// Symmetric max of the two directed max-min pin-set distances.
double hausdorff_distance(const Net& n1, const Net& n2);

/// Minimum-cost matching between the pin sets. Equal cardinalities: the
/// min-cost bijection (assignment sum). Unequal: uniform-mass optimal
/// transport (each pin carries mass 1/|N|), solved exactly by min-cost flow.
double earth_mover_distance(const Net& n1, const Net& n2);

struct NetDistanceMatrix {
  NetMetric metric = NetMetric::HD;
  int size = 0;
  std::vector<double> values;  // size x size, symmetric, zero diagonal

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * size + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * size + j]; }
};

/// Pairwise net distances of a problem; entries computed concurrently.
NetDistanceMatrix net_distance_matrix(const Problem& problem, NetMetric metric,
                                      int workers = 0);

/// Binary merge tree. Cluster ids 0..m-1 are the leaves (index into
/// `leaves`), id m+t is the cluster created by merge t. Heights live in
/// inverse-distance space and are non-decreasing.
struct Dendrogram {
  std::vector<int> leaves;  // net ids by leaf index
  struct MergeStep {
    int a = 0;
    int b = 0;
    double height = 0.0;
  };
  std::vector<MergeStep> merges;  // exactly leaves.size() - 1 entries

  int leaf_count() const { return static_cast<int>(leaves.size()); }
};

/// Agglomerative clustering on inverse distances (1/d), so the
/// farthest-apart net pair merges first. Ties break to the lexicographically
/// lowest cluster-id pair. Throws CoincidentNetsError when an off-diagonal
/// distance is zero.
Dendrogram cluster(const NetDistanceMatrix& distances, Linkage linkage = Linkage::Average);

/// Cut the dendrogram to exactly K clusters (undo the last K-1 merges).
/// Returns the layer (1..K) per leaf index; layers are numbered by the
/// smallest contained net id. Cuts are nested across K.
std::vector<int> assign_layers(const Dendrogram& dendrogram, int layer_count);

struct MultilayerOptions {
  NetMetric metric = NetMetric::HD;
  Linkage linkage = Linkage::Average;
  std::optional<int> layer_count;  // absent -> MCDL search rising from K = 1
  std::uint64_t seed = 0;
  double per_layer_budget_seconds = 60.0;
  int workers = 0;
  bool feature_expansion = true;
  bool distance_terms = true;
};

struct LayerSolve {
  int layer = 0;
  std::vector<int> net_ids;  // original net ids on this layer
  Problem subproblem;        // same board, nets relabeled 1..z
  GomlpResult result;
};

struct McdlTrial {
  int layer_count = 0;
  std::vector<int> layer_ei;       // per layer, ordered by layer number
  std::vector<bool> layer_feasible;
  bool all_desirable = false;
};

struct MultilayerResult {
  NetDistanceMatrix distances;
  Dendrogram dendrogram;
  std::vector<int> assignment;  // layer per leaf index, for layers_used
  int layers_used = 0;
  bool mcdl_search = false;
  bool mcdl_determined = false;
  int mcdl = 0;  // meaningful when mcdl_determined
  std::vector<McdlTrial> trials;
  std::vector<LayerSolve> layer_results;
  double wall_time_seconds = 0.0;
};

/// H-GOMLP: distance matrix, dendrogram, layer assignment, GOMLP per layer
/// (layers run concurrently with independent derived seeds). With no layer
/// count given, K rises from 1 until every layer is feasible with EI = 0;
/// that K is the MCDL. The dendrogram is clustered once and cut per K.
MultilayerResult solve_multilayer(const Problem& problem, const MultilayerOptions& options,
                                  const GaConfig& ga, const TrainConfig& train);

}  // namespace pplane
