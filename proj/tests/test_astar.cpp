#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "pplane/astar.hpp"
#include "pplane/rng.hpp"

using namespace pplane;

namespace {

Pin pin(double x, double y) { return {x, y, x, y}; }

double segment_length(const Segment& s) {
  return std::hypot(s.bx - s.ax, s.by - s.ay);
}

double tree_weight(const std::vector<Segment>& segments) {
  double total = 0.0;
  for (const auto& s : segments) total += segment_length(s);
  return total;
}

// Exhaustive spanning-tree oracle: minimum total weight over all edge
// subsets of size n-1 that connect the pins.
double brute_force_mst_weight(const std::vector<Pin>& pins) {
  const int n = static_cast<int>(pins.size());
  if (n < 2) return 0.0;
  struct Edge {
    int a, b;
    double w;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      edges.push_back({i, j, std::hypot(pins[i].x - pins[j].x, pins[i].y - pins[j].y)});
    }
  }
  const int e = static_cast<int>(edges.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(n - 1));

  // Iterate all C(e, n-1) combinations.
  for (int i = 0; i < n - 1; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    // Connectivity check via tiny union-find.
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    std::function<int(int)> find = [&](int x) {
      return parent[static_cast<std::size_t>(x)] == x
                 ? x
                 : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
    };
    int components = n;
    double weight = 0.0;
    for (int idx : pick) {
      const Edge& edge = edges[static_cast<std::size_t>(idx)];
      weight += edge.w;
      const int ra = find(edge.a);
      const int rb = find(edge.b);
      if (ra != rb) {
        parent[static_cast<std::size_t>(ra)] = rb;
        --components;
      }
    }
    if (components == 1) best = std::min(best, weight);

    // Next combination.
    int slot = n - 2;
    while (slot >= 0 && pick[static_cast<std::size_t>(slot)] == e - (n - 1) + slot) --slot;
    if (slot < 0) break;
    ++pick[static_cast<std::size_t>(slot)];
    for (int j = slot + 1; j < n - 1; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

// Independent Dijkstra oracle over the routing graph's public interface.
double dijkstra_cost(const RoutingGraph& graph, const std::vector<int>& sources,
                     const std::vector<int>& targets) {
  std::vector<double> dist(static_cast<std::size_t>(graph.node_count()),
                           std::numeric_limits<double>::infinity());
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>> queue;
  for (int s : sources) {
    if (graph.is_blocked(s)) continue;
    dist[static_cast<std::size_t>(s)] = 0.0;
    queue.emplace(0.0, s);
  }
  std::vector<char> is_target(static_cast<std::size_t>(graph.node_count()), 0);
  for (int t : targets) is_target[static_cast<std::size_t>(t)] = 1;

  int nodes[8];
  double weights[8];
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    if (is_target[static_cast<std::size_t>(u)] && !graph.is_blocked(u)) return d;
    const int count = graph.neighbors(u, nodes, weights);
    for (int e = 0; e < count; ++e) {
      const double nd = d + weights[e];
      if (nd < dist[static_cast<std::size_t>(nodes[e])]) {
        dist[static_cast<std::size_t>(nodes[e])] = nd;
        queue.emplace(nd, nodes[e]);
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

TEST_CASE("single pin yields no MST segments") {
  CHECK(kruskal_mst({pin(0.5, 0.5)}).empty());
}

TEST_CASE("3-4-5 triangle keeps the two short sides") {
  const std::vector<Pin> pins{pin(0.0, 0.0), pin(0.3, 0.0), pin(0.0, 0.4)};
  const auto mst = kruskal_mst(pins);
  REQUIRE(mst.size() == 2);
  CHECK(tree_weight(mst) == doctest::Approx(0.7));
}

TEST_CASE("kruskal matches the exhaustive spanning-tree minimum") {
  RandomStream rng(1001);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(6));  // up to 7 pins
    std::vector<Pin> pins;
    for (int i = 0; i < n; ++i) pins.push_back(pin(rng.uniform(), rng.uniform()));
    const auto mst = kruskal_mst(pins);
    REQUIRE(static_cast<int>(mst.size()) == n - 1);
    CHECK(tree_weight(mst) == doctest::Approx(brute_force_mst_weight(pins)).epsilon(1e-9));
  }
}

TEST_CASE("segment intersection cases") {
  // Proper crossing.
  CHECK(segments_intersect({0, 0, 2, 2}, {0, 2, 2, 0}));
  // Disjoint collinear.
  CHECK_FALSE(segments_intersect({0, 0, 1, 0}, {2, 0, 3, 0}));
  // Shared endpoint counts as intersecting.
  CHECK(segments_intersect({0, 0, 1, 1}, {1, 1, 2, 0}));
  // Collinear overlap.
  CHECK(segments_intersect({0, 0, 2, 0}, {1, 0, 3, 0}));
  // T-touch.
  CHECK(segments_intersect({0, 0, 2, 0}, {1, 0, 1, 1}));
  // Near miss.
  CHECK_FALSE(segments_intersect({0, 0, 1, 0}, {0, 0.01, 1, 0.01}));
}

TEST_CASE("non-crossing MSTs survive pruning as one tree per net") {
  std::vector<RawNet> raw{{"A", {{0.1, 0.1}, {0.4, 0.1}}}, {"B", {{0.1, 0.8}, {0.4, 0.8}}}};
  const Problem p = normalize_problem(raw, 1.0, 1.0, 16);
  std::vector<std::vector<Segment>> msts;
  for (const auto& net : p.nets) msts.push_back(kruskal_mst(net.pins));
  const auto grouped = prune_and_group(p, msts);
  REQUIRE(grouped[0].size() == 1);
  REQUIRE(grouped[1].size() == 1);
  CHECK(grouped[0][0].pin_indices.size() == 2);
  CHECK(grouped[0][0].segments.size() == 1);
}

TEST_CASE("crossing edges are removed from both nets simultaneously") {
  std::vector<RawNet> raw{{"A", {{0.1, 0.1}, {0.9, 0.9}}}, {"B", {{0.1, 0.9}, {0.9, 0.1}}}};
  const Problem p = normalize_problem(raw, 1.0, 1.0, 16);
  std::vector<std::vector<Segment>> msts;
  for (const auto& net : p.nets) msts.push_back(kruskal_mst(net.pins));
  const auto grouped = prune_and_group(p, msts);
  CHECK(grouped[0].size() == 2);  // both edges gone, singleton pins remain
  CHECK(grouped[1].size() == 2);
  for (const auto& tree : grouped[0]) CHECK(tree.segments.empty());
}

TEST_CASE("a cut middle edge bipartitions a 4-pin net accordingly") {
  // Net A chains four pins left to right; net B's edge cuts the middle link.
  std::vector<RawNet> raw{
      {"A", {{0.1, 0.5}, {0.3, 0.5}, {0.7, 0.5}, {0.9, 0.5}}},
      {"B", {{0.5, 0.2}, {0.5, 0.8}}}};
  const Problem p = normalize_problem(raw, 1.0, 1.0, 16);
  std::vector<std::vector<Segment>> msts;
  for (const auto& net : p.nets) msts.push_back(kruskal_mst(net.pins));
  const auto grouped = prune_and_group(p, msts);
  REQUIRE(grouped[0].size() == 2);

  // Components oracle: {0,1} and {2,3} by pin index.
  std::vector<std::vector<int>> parts;
  for (const auto& tree : grouped[0]) {
    auto sorted = tree.pin_indices;
    std::sort(sorted.begin(), sorted.end());
    parts.push_back(sorted);
  }
  std::sort(parts.begin(), parts.end());
  CHECK(parts[0] == std::vector<int>{0, 1});
  CHECK(parts[1] == std::vector<int>{2, 3});
}

TEST_CASE("pruning output is independent of net enumeration order") {
  RandomStream rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<RawNet> raw(3);
    for (int i = 0; i < 3; ++i) {
      raw[static_cast<std::size_t>(i)].label = std::string(1, static_cast<char>('A' + i));
      for (int q = 0; q < 4; ++q) {
        raw[static_cast<std::size_t>(i)].pins.emplace_back(rng.uniform(0.05, 0.95),
                                                           rng.uniform(0.05, 0.95));
      }
    }
    const Problem p = normalize_problem(raw, 1.0, 1.0, 16);
    std::vector<std::vector<Segment>> msts;
    for (const auto& net : p.nets) msts.push_back(kruskal_mst(net.pins));

    std::vector<RawNet> reversed{raw[2], raw[1], raw[0]};
    const Problem p2 = normalize_problem(reversed, 1.0, 1.0, 16);
    std::vector<std::vector<Segment>> msts2;
    for (const auto& net : p2.nets) msts2.push_back(kruskal_mst(net.pins));

    const auto g1 = prune_and_group(p, msts);
    const auto g2 = prune_and_group(p2, msts2);
    for (int i = 0; i < 3; ++i) {
      CHECK(g1[static_cast<std::size_t>(i)].size() == g2[static_cast<std::size_t>(2 - i)].size());
    }
  }
}

TEST_CASE("every pin lands in exactly one tree of its net") {
  RandomStream rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<RawNet> raw(3);
    for (int i = 0; i < 3; ++i) {
      raw[static_cast<std::size_t>(i)].label = std::string(1, static_cast<char>('A' + i));
      const int q = 2 + static_cast<int>(rng.uniform_index(4));
      for (int pin_i = 0; pin_i < q; ++pin_i) {
        raw[static_cast<std::size_t>(i)].pins.emplace_back(rng.uniform(0.05, 0.95),
                                                           rng.uniform(0.05, 0.95));
      }
    }
    const Problem p = normalize_problem(raw, 1.0, 1.0, 16);
    std::vector<std::vector<Segment>> msts;
    for (const auto& net : p.nets) msts.push_back(kruskal_mst(net.pins));
    const auto grouped = prune_and_group(p, msts);
    for (int i = 0; i < 3; ++i) {
      std::vector<int> seen;
      for (const auto& tree : grouped[static_cast<std::size_t>(i)]) {
        seen.insert(seen.end(), tree.pin_indices.begin(), tree.pin_indices.end());
      }
      std::sort(seen.begin(), seen.end());
      std::vector<int> expected(p.nets[static_cast<std::size_t>(i)].pins.size());
      std::iota(expected.begin(), expected.end(), 0);
      CHECK(seen == expected);
    }
  }
}

TEST_CASE("A* equals Dijkstra on random routing graphs") {
  RandomStream rng(424242);
  for (int trial = 0; trial < 30; ++trial) {
    const int res = 8 + static_cast<int>(rng.uniform_index(17));
    RoutingGraph graph(res);
    for (auto& b : graph.blocked) b = rng.bernoulli(0.25) ? 1 : 0;

    std::vector<int> sources, targets;
    for (int i = 0; i < 3; ++i) {
      sources.push_back(static_cast<int>(rng.uniform_index(graph.node_count())));
      targets.push_back(static_cast<int>(rng.uniform_index(graph.node_count())));
    }
    for (int s : sources) graph.blocked[static_cast<std::size_t>(s)] = 0;
    for (int t : targets) graph.blocked[static_cast<std::size_t>(t)] = 0;

    const PathResult astar = astar_shortest_path(graph, sources, targets);
    const double oracle = dijkstra_cost(graph, sources, targets);
    if (astar.found) {
      CHECK(astar.cost == doctest::Approx(oracle).epsilon(1e-12));
    } else {
      CHECK(std::isinf(oracle));
    }
  }
}

TEST_CASE("two islands on an empty board connect within the lattice factor") {
  std::vector<RawNet> raw{{"A", {{0.1, 0.5}, {0.9, 0.5}}}};
  const Problem p = normalize_problem(raw, 1.0, 1.0, 32);
  // Force two singleton trees by pruning nothing but skipping the MST.
  std::vector<std::vector<PinTree>> trees(1);
  trees[0].push_back({{0}, {}});
  trees[0].push_back({{1}, {}});
  const auto [connected, report] = connect_islands(p, trees, 32);
  REQUIRE(report.attempts.size() == 1);
  CHECK(report.attempts[0].connected);
  CHECK(connected[0].size() == 1);
  // Straight-line distance 0.8; the 8-neighbor lattice can do it within
  // sqrt(2) of that.
  CHECK(report.attempts[0].path_cost <= 0.8 * std::sqrt(2.0) + 0.1);
}

TEST_CASE("conflicting corridors: first net connects, second reports failure") {
  // A narrow vertical corridor at x ~ 0.5 is the only way across for both
  // nets; the wider net (routed first) takes it and blocks the other.
  std::vector<RawNet> raw{
      {"A", {{0.05, 0.5}, {0.95, 0.5}, {0.05, 0.4}}},
      {"B", {{0.05, 0.6}, {0.95, 0.6}}},
      {"C", {{0.3, 0.05}, {0.3, 0.95}, {0.42, 0.05}, {0.42, 0.95}, {0.6, 0.05},
             {0.6, 0.95}, {0.75, 0.05}, {0.75, 0.95}}}};
  const Problem p = normalize_problem(raw, 1.0, 1.0, 24);

  std::vector<std::vector<Segment>> msts;
  for (const auto& net : p.nets) msts.push_back(kruskal_mst(net.pins));
  const auto grouped = prune_and_group(p, msts);
  const auto [connected, report] = connect_islands(p, grouped, 24);

  bool a_connected = connected[0].size() == 1;
  bool b_connected = connected[1].size() == 1;
  // The sequential blocking must starve at least one of the two rivals.
  CHECK((a_connected != b_connected || !a_connected));
}

TEST_CASE("knn inflation of a single net is uniform") {
  std::vector<RawNet> raw{{"A", {{0.2, 0.2}, {0.8, 0.8}}}};
  const Problem p = normalize_problem(raw, 1.0, 1.0, 20);
  std::vector<std::vector<PinTree>> trees(1);
  trees[0].push_back({{0, 1}, {{0.2, 0.2, 0.8, 0.8}}});
  const Grid grid = inflate_knn(p, trees, 20);
  for (int label : grid.labels) CHECK(label == 1);
}

TEST_CASE("two parallel vertical trees split the board near x = 0.5") {
  std::vector<RawNet> raw{{"A", {{0.25, 0.1}, {0.25, 0.9}}}, {"B", {{0.75, 0.1}, {0.75, 0.9}}}};
  const Problem p = normalize_problem(raw, 1.0, 1.0, 40);
  std::vector<std::vector<PinTree>> trees(2);
  trees[0].push_back({{0, 1}, {{0.25, 0.1, 0.25, 0.9}}});
  trees[1].push_back({{0, 1}, {{0.75, 0.1, 0.75, 0.9}}});
  const Grid grid = inflate_knn(p, trees, 40);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 40; ++c) {
      const double x = cell_center(c, 40);
      if (x < 0.475) CHECK(grid.at(r, c) == 1);
      if (x > 0.525) CHECK(grid.at(r, c) == 2);
    }
  }
}

TEST_CASE("knn inflation equals the brute-force nearest-sample scan") {
  RandomStream rng(606);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<RawNet> raw(3);
    std::vector<std::vector<PinTree>> trees(3);
    for (int i = 0; i < 3; ++i) {
      raw[static_cast<std::size_t>(i)].label = std::string(1, static_cast<char>('A' + i));
      PinTree tree;
      for (int q = 0; q < 3; ++q) {
        raw[static_cast<std::size_t>(i)].pins.emplace_back(rng.uniform(0.05, 0.95),
                                                           rng.uniform(0.05, 0.95));
        tree.pin_indices.push_back(q);
      }
      tree.segments.push_back({raw[static_cast<std::size_t>(i)].pins[0].first,
                               raw[static_cast<std::size_t>(i)].pins[0].second,
                               raw[static_cast<std::size_t>(i)].pins[1].first,
                               raw[static_cast<std::size_t>(i)].pins[1].second});
      trees[static_cast<std::size_t>(i)].push_back(tree);
    }
    const Problem p = normalize_problem(raw, 1.0, 1.0, 24);
    const int res = 24;
    const Grid fast = inflate_knn(p, trees, res);

    // Brute force: regenerate the same sample set and scan all of it per cell.
    struct Sample {
      double x, y;
      int net;
    };
    std::vector<Sample> samples;
    const double spacing = 0.5 / res;
    for (int i = 0; i < 3; ++i) {
      for (const auto& tree : trees[static_cast<std::size_t>(i)]) {
        for (int pi : tree.pin_indices) {
          samples.push_back({p.nets[static_cast<std::size_t>(i)].pins[static_cast<std::size_t>(pi)].x,
                             p.nets[static_cast<std::size_t>(i)].pins[static_cast<std::size_t>(pi)].y,
                             i + 1});
        }
        for (const auto& seg : tree.segments) {
          const double len = std::hypot(seg.bx - seg.ax, seg.by - seg.ay);
          const int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
          for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            samples.push_back({seg.ax + t * (seg.bx - seg.ax), seg.ay + t * (seg.by - seg.ay),
                               i + 1});
          }
        }
      }
    }
    for (int r = 0; r < res; ++r) {
      for (int c = 0; c < res; ++c) {
        double best = 1e300;
        int best_net = 0;
        for (const auto& smp : samples) {
          const double dx = cell_center(c, res) - smp.x;
          const double dy = cell_center(r, res) - smp.y;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best || (d2 == best && smp.net < best_net)) {
            best = d2;
            best_net = smp.net;
          }
        }
        CHECK(fast.at(r, c) == best_net);
      }
    }
  }
}

TEST_CASE("full pipeline on an easy two-net board reaches EI 0") {
  std::vector<RawNet> raw{{"A", {{0.15, 0.2}, {0.3, 0.25}, {0.2, 0.4}}},
                          {"B", {{0.8, 0.75}, {0.7, 0.85}, {0.85, 0.6}}}};
  const Problem p = normalize_problem(raw, 1.0, 1.0, 50);
  const AstarResult result = solve_astar(p);
  CHECK(result.ei == 0);
  CHECK(result.feasible);
  CHECK(result.report.all_connected());
}
