#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pplane/geometry.hpp"

namespace pplane {

/// A straight connection between two board points, normalized coordinates.
struct Segment {
  double ax = 0.0, ay = 0.0;
  double bx = 0.0, by = 0.0;
};

/// Euclidean minimum spanning tree of a pin set (Kruskal over the complete
/// graph). One pin yields an empty segment list.
std::vector<Segment> kruskal_mst(const std::vector<Pin>& pins);

/// True iff the closed segments share any point: proper crossing, endpoint
/// touch, or collinear overlap.
bool segments_intersect(const Segment& s1, const Segment& s2);

/// A connected tree of pins after pruning: member pin indices (into the
/// net's pin list) plus the surviving or routed segments joining them.
struct PinTree {
  std::vector<int> pin_indices;
  std::vector<Segment> segments;
};

/// Remove every MST segment that intersects a segment of a different net
/// (one simultaneous pass over the original MSTs), then split each net into
/// the connected components of the surviving forest. Singleton pins become
/// singleton trees. Output is independent of net enumeration order.
std::vector<std::vector<PinTree>> prune_and_group(
    const Problem& problem, const std::vector<std::vector<Segment>>& msts);

/// 8-neighbor lattice over the board with Euclidean edge weights and a
/// blocked-node mask. Nodes sit at cell centers of a resolution x resolution
/// grid; blocked nodes have no traversable edges.
struct RoutingGraph {
  int resolution = 0;
  std::vector<std::uint8_t> blocked;

  explicit RoutingGraph(int res = 0)
      : resolution(res),
        blocked(static_cast<std::size_t>(res) * static_cast<std::size_t>(res), 0) {}

  int node_count() const { return resolution * resolution; }
  int node(int row, int col) const { return row * resolution + col; }
  int row_of(int n) const { return n / resolution; }
  int col_of(int n) const { return n % resolution; }
  bool is_blocked(int n) const { return blocked[static_cast<std::size_t>(n)] != 0; }
  double x_of(int n) const { return cell_center(col_of(n), resolution); }
  double y_of(int n) const { return cell_center(row_of(n), resolution); }

  /// Traversable 8-neighbors of n with edge weights, in fixed scan order.
  /// Returns the number written into the provided arrays (max 8).
  int neighbors(int n, int* out_nodes, double* out_weights) const;
};

struct PathResult {
  bool found = false;
  double cost = 0.0;
  std::vector<int> nodes;  // source..target inclusive
};

/// Multi-source, multi-target A* with the (admissible, consistent)
/// min-Euclidean-distance-to-target-set heuristic. Cost-optimal.
PathResult astar_shortest_path(const RoutingGraph& graph, const std::vector<int>& sources,
                               const std::vector<int>& targets);

struct PairAttempt {
  int net_id = 0;
  bool connected = false;
  double path_cost = 0.0;
};

struct ConnectReport {
  std::vector<PairAttempt> attempts;
  bool all_connected() const {
    for (const auto& a : attempts)
      if (!a.connected) return false;
    return true;
  }
  int failures() const {
    int n = 0;
    for (const auto& a : attempts) n += a.connected ? 0 : 1;
    return n;
  }
};

/// Sequential island connection: nets in descending pin count (ties by id),
/// island pairs greedily by nearest current-component distance, each pair
/// joined by an A* path whose nodes then block other nets. Unconnectable
/// pairs are recorded and the net stays split.
std::pair<std::vector<std::vector<PinTree>>, ConnectReport> connect_islands(
    const Problem& problem, const std::vector<std::vector<PinTree>>& trees,
    int graph_resolution);

/// 1-nearest-neighbor plane inflation: dense samples along every tree
/// segment (half-cell spacing) plus the pins; each grid cell takes the net
/// of its nearest sample, ties to the lowest net id.
Grid inflate_knn(const Problem& problem, const std::vector<std::vector<PinTree>>& trees,
                 int resolution);

struct AstarResult {
  Partition partition;
  ConnectReport report;
  int ei = 0;
  bool feasible = false;
  double wall_time_seconds = 0.0;
};

/// The full baseline pipeline: MST, prune, connect, inflate.
/// graph_resolution 0 means "use the problem grid resolution".
AstarResult solve_astar(const Problem& problem, int graph_resolution = 0);

}  // namespace pplane
