#include "pplane/astar.hpp"

#include "pplane/partition_eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace pplane {

namespace {

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

double dist2(double ax, double ay, double bx, double by) {
  const double dx = ax - bx;
  const double dy = ay - by;
  return dx * dx + dy * dy;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

int orientation(double ax, double ay, double bx, double by, double cx, double cy) {
  const double cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  if (cross > 0.0) return 1;
  if (cross < 0.0) return -1;
  return 0;
}

bool on_segment(double ax, double ay, double bx, double by, double px, double py) {
  return std::min(ax, bx) <= px && px <= std::max(ax, bx) && std::min(ay, by) <= py &&
         py <= std::max(ay, by);
}

// Cells covered by a segment, sampled at half-cell spacing.
void mark_segment_cells(const Segment& seg, int res, std::vector<std::uint8_t>& mask) {
  const double len = std::sqrt(dist2(seg.ax, seg.ay, seg.bx, seg.by));
  const double spacing = 0.5 / res;
  const int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    const double x = seg.ax + t * (seg.bx - seg.ax);
    const double y = seg.ay + t * (seg.by - seg.ay);
    mask[static_cast<std::size_t>(cell_index(y, res)) * res + cell_index(x, res)] = 1;
  }
}

std::vector<std::uint8_t> tree_occupancy(const Problem& problem, int net_index,
                                         const PinTree& tree, int res) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(res) * res, 0);
  const auto& pins = problem.nets[static_cast<std::size_t>(net_index)].pins;
  for (int pi : tree.pin_indices) {
    const Pin& pin = pins[static_cast<std::size_t>(pi)];
    mask[static_cast<std::size_t>(cell_index(pin.y, res)) * res + cell_index(pin.x, res)] = 1;
  }
  for (const auto& seg : tree.segments) mark_segment_cells(seg, res, mask);
  return mask;
}

void dilate_into(const std::vector<std::uint8_t>& src, int res,
                 std::vector<std::uint8_t>& dst) {
  for (int r = 0; r < res; ++r) {
    for (int c = 0; c < res; ++c) {
      if (!src[static_cast<std::size_t>(r) * res + c]) continue;
      dst[static_cast<std::size_t>(r) * res + c] = 1;
      for (int d = 0; d < 8; ++d) {
        const int nr = r + kDr[d];
        const int nc = c + kDc[d];
        if (nr >= 0 && nr < res && nc >= 0 && nc < res) {
          dst[static_cast<std::size_t>(nr) * res + nc] = 1;
        }
      }
    }
  }
}

}  // namespace

std::vector<Segment> kruskal_mst(const std::vector<Pin>& pins) {
  const int n = static_cast<int>(pins.size());
  std::vector<Segment> result;
  if (n < 2) return result;

  struct Edge {
    double length2;
    int a, b;
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      edges.push_back({dist2(pins[i].x, pins[i].y, pins[j].x, pins[j].y), i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& e1, const Edge& e2) {
    if (e1.length2 != e2.length2) return e1.length2 < e2.length2;
    if (e1.a != e2.a) return e1.a < e2.a;
    return e1.b < e2.b;
  });

  UnionFind uf(n);
  result.reserve(static_cast<std::size_t>(n) - 1);
  for (const auto& e : edges) {
    if (uf.unite(e.a, e.b)) {
      result.push_back({pins[e.a].x, pins[e.a].y, pins[e.b].x, pins[e.b].y});
      if (static_cast<int>(result.size()) == n - 1) break;
    }
  }
  return result;
}

bool segments_intersect(const Segment& s1, const Segment& s2) {
  const int o1 = orientation(s1.ax, s1.ay, s1.bx, s1.by, s2.ax, s2.ay);
  const int o2 = orientation(s1.ax, s1.ay, s1.bx, s1.by, s2.bx, s2.by);
  const int o3 = orientation(s2.ax, s2.ay, s2.bx, s2.by, s1.ax, s1.ay);
  const int o4 = orientation(s2.ax, s2.ay, s2.bx, s2.by, s1.bx, s1.by);

  if (o1 != o2 && o3 != o4) return true;

  if (o1 == 0 && on_segment(s1.ax, s1.ay, s1.bx, s1.by, s2.ax, s2.ay)) return true;
  if (o2 == 0 && on_segment(s1.ax, s1.ay, s1.bx, s1.by, s2.bx, s2.by)) return true;
  if (o3 == 0 && on_segment(s2.ax, s2.ay, s2.bx, s2.by, s1.ax, s1.ay)) return true;
  if (o4 == 0 && on_segment(s2.ax, s2.ay, s2.bx, s2.by, s1.bx, s1.by)) return true;
  return false;
}

std::vector<std::vector<PinTree>> prune_and_group(
    const Problem& problem, const std::vector<std::vector<Segment>>& msts) {
  const int m = problem.net_count();

  // Removal set computed symmetrically against the original MSTs.
  std::vector<std::vector<char>> removed(msts.size());
  for (std::size_t i = 0; i < msts.size(); ++i) removed[i].assign(msts[i].size(), 0);

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (std::size_t a = 0; a < msts[static_cast<std::size_t>(i)].size(); ++a) {
        for (std::size_t b = 0; b < msts[static_cast<std::size_t>(j)].size(); ++b) {
          if (segments_intersect(msts[static_cast<std::size_t>(i)][a],
                                 msts[static_cast<std::size_t>(j)][b])) {
            removed[static_cast<std::size_t>(i)][a] = 1;
            removed[static_cast<std::size_t>(j)][b] = 1;
          }
        }
      }
    }
  }

  std::vector<std::vector<PinTree>> grouped(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& pins = problem.nets[static_cast<std::size_t>(i)].pins;
    const auto& mst = msts[static_cast<std::size_t>(i)];
    const int q = static_cast<int>(pins.size());
    UnionFind uf(q);

    // Match surviving segments back to their pin endpoints by coordinates.
    auto pin_at = [&](double x, double y) {
      for (int p = 0; p < q; ++p) {
        if (pins[static_cast<std::size_t>(p)].x == x && pins[static_cast<std::size_t>(p)].y == y)
          return p;
      }
      return -1;
    };

    std::vector<std::vector<Segment>> comp_segments(static_cast<std::size_t>(q));
    std::vector<std::pair<int, int>> kept_edges;
    for (std::size_t s = 0; s < mst.size(); ++s) {
      if (removed[static_cast<std::size_t>(i)][s]) continue;
      const int pa = pin_at(mst[s].ax, mst[s].ay);
      const int pb = pin_at(mst[s].bx, mst[s].by);
      uf.unite(pa, pb);
      kept_edges.emplace_back(static_cast<int>(s), pa);
    }

    std::vector<int> root_to_tree(static_cast<std::size_t>(q), -1);
    auto& trees = grouped[static_cast<std::size_t>(i)];
    for (int p = 0; p < q; ++p) {
      const int root = uf.find(p);
      if (root_to_tree[static_cast<std::size_t>(root)] < 0) {
        root_to_tree[static_cast<std::size_t>(root)] = static_cast<int>(trees.size());
        trees.emplace_back();
      }
      trees[static_cast<std::size_t>(root_to_tree[static_cast<std::size_t>(root)])]
          .pin_indices.push_back(p);
    }
    for (const auto& [seg_idx, pa] : kept_edges) {
      const int root = uf.find(pa);
      trees[static_cast<std::size_t>(root_to_tree[static_cast<std::size_t>(root)])]
          .segments.push_back(mst[static_cast<std::size_t>(seg_idx)]);
    }
  }
  return grouped;
}

int RoutingGraph::neighbors(int n, int* out_nodes, double* out_weights) const {
  if (is_blocked(n)) return 0;
  const int r = row_of(n);
  const int c = col_of(n);
  const double pitch = 1.0 / resolution;
  const double diag = pitch * std::sqrt(2.0);
  int count = 0;
  for (int d = 0; d < 8; ++d) {
    const int nr = r + kDr[d];
    const int nc = c + kDc[d];
    if (nr < 0 || nr >= resolution || nc < 0 || nc >= resolution) continue;
    const int nn = node(nr, nc);
    if (is_blocked(nn)) continue;
    out_nodes[count] = nn;
    out_weights[count] = (kDr[d] != 0 && kDc[d] != 0) ? diag : pitch;
    ++count;
  }
  return count;
}

PathResult astar_shortest_path(const RoutingGraph& graph, const std::vector<int>& sources,
                               const std::vector<int>& targets) {
  PathResult result;
  if (sources.empty() || targets.empty()) return result;

  const int n = graph.node_count();
  std::vector<double> g_cost(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<char> closed(static_cast<std::size_t>(n), 0);
  std::vector<char> is_target(static_cast<std::size_t>(n), 0);
  for (int t : targets) {
    if (!graph.is_blocked(t)) is_target[static_cast<std::size_t>(t)] = 1;
  }

  auto heuristic = [&](int node) {
    double best = std::numeric_limits<double>::infinity();
    const double x = graph.x_of(node);
    const double y = graph.y_of(node);
    for (int t : targets) {
      best = std::min(best, dist2(x, y, graph.x_of(t), graph.y_of(t)));
    }
    return std::sqrt(best);
  };

  using QueueEntry = std::pair<double, int>;  // (f, node); ties by lower node id
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  for (int s : sources) {
    if (graph.is_blocked(s)) continue;
    if (g_cost[static_cast<std::size_t>(s)] == 0.0) continue;
    g_cost[static_cast<std::size_t>(s)] = 0.0;
    open.emplace(heuristic(s), s);
  }

  int neighbor_nodes[8];
  double neighbor_weights[8];
  while (!open.empty()) {
    const auto [f, node] = open.top();
    open.pop();
    if (closed[static_cast<std::size_t>(node)]) continue;
    closed[static_cast<std::size_t>(node)] = 1;
    if (is_target[static_cast<std::size_t>(node)]) {
      result.found = true;
      result.cost = g_cost[static_cast<std::size_t>(node)];
      for (int cur = node; cur != -1; cur = parent[static_cast<std::size_t>(cur)]) {
        result.nodes.push_back(cur);
      }
      std::reverse(result.nodes.begin(), result.nodes.end());
      return result;
    }
    const int count = graph.neighbors(node, neighbor_nodes, neighbor_weights);
    for (int e = 0; e < count; ++e) {
      const int next = neighbor_nodes[e];
      if (closed[static_cast<std::size_t>(next)]) continue;
      const double tentative = g_cost[static_cast<std::size_t>(node)] + neighbor_weights[e];
      if (tentative < g_cost[static_cast<std::size_t>(next)]) {
        g_cost[static_cast<std::size_t>(next)] = tentative;
        parent[static_cast<std::size_t>(next)] = node;
        open.emplace(tentative + heuristic(next), next);
      }
    }
  }
  return result;
}

std::pair<std::vector<std::vector<PinTree>>, ConnectReport> connect_islands(
    const Problem& problem, const std::vector<std::vector<PinTree>>& trees,
    int graph_resolution) {
  const int m = problem.net_count();
  const int res = graph_resolution > 0 ? graph_resolution : problem.grid_resolution;

  std::vector<std::vector<PinTree>> final_trees = trees;
  ConnectReport report;

  // Every net's occupancy, kept current as paths are committed.
  std::vector<std::vector<std::uint8_t>> occupancy(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(res) * res, 0);
    for (const auto& tree : final_trees[static_cast<std::size_t>(i)]) {
      const auto tmask = tree_occupancy(problem, i, tree, res);
      for (std::size_t c = 0; c < mask.size(); ++c) mask[c] |= tmask[c];
    }
    occupancy[static_cast<std::size_t>(i)] = std::move(mask);
  }

  // Descending pin count, ties by net id.
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto qa = problem.nets[static_cast<std::size_t>(a)].pins.size();
    const auto qb = problem.nets[static_cast<std::size_t>(b)].pins.size();
    if (qa != qb) return qa > qb;
    return a < b;
  });

  for (int net_index : order) {
    auto& net_trees = final_trees[static_cast<std::size_t>(net_index)];
    if (net_trees.size() < 2) continue;

    RoutingGraph graph(res);
    for (int other = 0; other < m; ++other) {
      if (other == net_index) continue;
      dilate_into(occupancy[static_cast<std::size_t>(other)], res, graph.blocked);
    }

    // Per-component cell sets on the routing lattice.
    std::vector<std::vector<int>> comp_cells;
    for (const auto& tree : net_trees) {
      const auto mask = tree_occupancy(problem, net_index, tree, res);
      std::vector<int> cells;
      for (int c = 0; c < res * res; ++c) {
        if (mask[static_cast<std::size_t>(c)]) cells.push_back(c);
      }
      comp_cells.push_back(std::move(cells));
    }

    auto component_distance = [&](const std::vector<int>& a, const std::vector<int>& b) {
      double best = std::numeric_limits<double>::infinity();
      for (int ca : a) {
        const double ax = cell_center(ca % res, res);
        const double ay = cell_center(ca / res, res);
        for (int cb : b) {
          best = std::min(
              best, dist2(ax, ay, cell_center(cb % res, res), cell_center(cb / res, res)));
        }
      }
      return std::sqrt(best);
    };

    std::vector<char> alive(net_trees.size(), 1);
    std::vector<std::vector<char>> failed(net_trees.size(),
                                          std::vector<char>(net_trees.size(), 0));

    while (true) {
      // Nearest pair of live components not yet marked unconnectable.
      int best_a = -1, best_b = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < net_trees.size(); ++a) {
        if (!alive[a]) continue;
        for (std::size_t b = a + 1; b < net_trees.size(); ++b) {
          if (!alive[b] || failed[a][b]) continue;
          const double d = component_distance(comp_cells[a], comp_cells[b]);
          if (d < best_d) {
            best_d = d;
            best_a = static_cast<int>(a);
            best_b = static_cast<int>(b);
          }
        }
      }
      if (best_a < 0) break;

      std::vector<int> sources, targets;
      for (int c : comp_cells[static_cast<std::size_t>(best_a)]) {
        if (!graph.is_blocked(c)) sources.push_back(c);
      }
      for (int c : comp_cells[static_cast<std::size_t>(best_b)]) {
        if (!graph.is_blocked(c)) targets.push_back(c);
      }

      const PathResult path = astar_shortest_path(graph, sources, targets);
      PairAttempt attempt;
      attempt.net_id = problem.nets[static_cast<std::size_t>(net_index)].id;
      attempt.connected = path.found;
      attempt.path_cost = path.cost;
      report.attempts.push_back(attempt);

      if (!path.found) {
        failed[static_cast<std::size_t>(best_a)][static_cast<std::size_t>(best_b)] = 1;
        continue;
      }

      // Commit: path polyline becomes tree segments; merge b into a.
      auto& tree_a = net_trees[static_cast<std::size_t>(best_a)];
      auto& tree_b = net_trees[static_cast<std::size_t>(best_b)];
      for (std::size_t s = 0; s + 1 < path.nodes.size(); ++s) {
        Segment seg;
        seg.ax = graph.x_of(path.nodes[s]);
        seg.ay = graph.y_of(path.nodes[s]);
        seg.bx = graph.x_of(path.nodes[s + 1]);
        seg.by = graph.y_of(path.nodes[s + 1]);
        tree_a.segments.push_back(seg);
      }
      if (path.nodes.size() == 1) {
        // Adjacent components; nothing to add, the merge is enough.
      }
      tree_a.pin_indices.insert(tree_a.pin_indices.end(), tree_b.pin_indices.begin(),
                                tree_b.pin_indices.end());
      tree_a.segments.insert(tree_a.segments.end(), tree_b.segments.begin(),
                             tree_b.segments.end());

      auto& cells_a = comp_cells[static_cast<std::size_t>(best_a)];
      cells_a.insert(cells_a.end(), comp_cells[static_cast<std::size_t>(best_b)].begin(),
                     comp_cells[static_cast<std::size_t>(best_b)].end());
      for (int node : path.nodes) {
        cells_a.push_back(node);
        occupancy[static_cast<std::size_t>(net_index)][static_cast<std::size_t>(node)] = 1;
      }
      std::sort(cells_a.begin(), cells_a.end());
      cells_a.erase(std::unique(cells_a.begin(), cells_a.end()), cells_a.end());

      alive[static_cast<std::size_t>(best_b)] = 0;
      // A merged component may unlock pairs that previously failed.
      for (auto& row : failed) row[static_cast<std::size_t>(best_a)] = 0;
      std::fill(failed[static_cast<std::size_t>(best_a)].begin(),
                failed[static_cast<std::size_t>(best_a)].end(), 0);
    }

    // Compact out the merged-away trees.
    std::vector<PinTree> survivors;
    for (std::size_t t = 0; t < net_trees.size(); ++t) {
      if (alive[t]) survivors.push_back(std::move(net_trees[t]));
    }
    net_trees = std::move(survivors);
  }

  return {std::move(final_trees), std::move(report)};
}

Grid inflate_knn(const Problem& problem, const std::vector<std::vector<PinTree>>& trees,
                 int resolution) {
  struct Sample {
    double x, y;
    int net_id;
  };
  std::vector<Sample> samples;
  const double spacing = 0.5 / resolution;

  for (std::size_t i = 0; i < trees.size(); ++i) {
    const int net_id = problem.nets[i].id;
    const auto& pins = problem.nets[i].pins;
    for (const auto& tree : trees[i]) {
      for (int pi : tree.pin_indices) {
        samples.push_back({pins[static_cast<std::size_t>(pi)].x,
                           pins[static_cast<std::size_t>(pi)].y, net_id});
      }
      for (const auto& seg : tree.segments) {
        const double len = std::sqrt(dist2(seg.ax, seg.ay, seg.bx, seg.by));
        const int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int s = 0; s <= steps; ++s) {
          const double t = static_cast<double>(s) / steps;
          samples.push_back(
              {seg.ax + t * (seg.bx - seg.ax), seg.ay + t * (seg.by - seg.ay), net_id});
        }
      }
    }
  }

  // Bucket samples by covering cell for ring search.
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(resolution) * resolution);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const int row = cell_index(samples[s].y, resolution);
    const int col = cell_index(samples[s].x, resolution);
    buckets[static_cast<std::size_t>(row) * resolution + col].push_back(static_cast<int>(s));
  }

  Grid grid(resolution, 0);
  const double pitch = 1.0 / resolution;
  for (int r = 0; r < resolution; ++r) {
    for (int c = 0; c < resolution; ++c) {
      const double x = cell_center(c, resolution);
      const double y = cell_center(r, resolution);
      double best_d2 = std::numeric_limits<double>::infinity();
      int best_net = 0;
      // Expanding Chebyshev rings; a sample in ring k is at least (k-1)
      // pitches away, so the scan can stop once that bound exceeds the
      // incumbent.
      for (int ring = 0; ring < resolution; ++ring) {
        if (best_net != 0) {
          const double bound = (ring - 1) * pitch;
          if (bound > 0.0 && bound * bound > best_d2) break;
        }
        const int r_lo = r - ring, r_hi = r + ring;
        const int c_lo = c - ring, c_hi = c + ring;
        for (int rr = r_lo; rr <= r_hi; ++rr) {
          if (rr < 0 || rr >= resolution) continue;
          const bool edge_row = (rr == r_lo || rr == r_hi);
          for (int cc = c_lo; cc <= c_hi; cc += edge_row ? 1 : (c_hi - c_lo > 0 ? c_hi - c_lo : 1)) {
            if (cc < 0 || cc >= resolution) continue;
            for (int si : buckets[static_cast<std::size_t>(rr) * resolution + cc]) {
              const auto& smp = samples[static_cast<std::size_t>(si)];
              const double d2 = dist2(x, y, smp.x, smp.y);
              if (d2 < best_d2 || (d2 == best_d2 && smp.net_id < best_net)) {
                best_d2 = d2;
                best_net = smp.net_id;
              }
            }
            if (c_hi == c_lo) break;
          }
        }
      }
      grid.at(r, c) = best_net;
    }
  }
  return grid;
}

AstarResult solve_astar(const Problem& problem, int graph_resolution) {
  const auto start = std::chrono::steady_clock::now();
  const int res = graph_resolution > 0 ? graph_resolution : problem.grid_resolution;

  std::vector<std::vector<Segment>> msts;
  msts.reserve(problem.nets.size());
  for (const auto& net : problem.nets) msts.push_back(kruskal_mst(net.pins));

  const auto grouped = prune_and_group(problem, msts);
  auto [final_trees, report] = connect_islands(problem, grouped, res);
  Grid grid = inflate_knn(problem, final_trees, problem.grid_resolution);

  AstarResult result;
  result.partition = make_partition(std::move(grid), problem.net_count());
  result.report = std::move(report);

  int total_islands = 0;
  bool all_present = true;
  for (const auto& per_net : result.partition.islands) {
    total_islands += static_cast<int>(per_net.size());
    all_present = all_present && !per_net.empty();
  }
  result.ei = total_islands - problem.net_count();
  result.feasible = all_present && check_feasible(problem, result.partition).feasible();
  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace pplane
