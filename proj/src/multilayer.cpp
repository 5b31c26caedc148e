#include "pplane/multilayer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace pplane {

namespace {

double pin_distance(const Pin& a, const Pin& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

long long gcd_ll(long long a, long long b) { return b == 0 ? a : gcd_ll(b, a % b); }

// Min-cost flow on a dense bipartite transport problem via successive
// shortest paths with potentials. Sizes here are pin counts, so the dense
// Dijkstra is plenty.
double min_cost_transport(const std::vector<std::vector<double>>& cost,
                          const std::vector<long long>& supply,
                          const std::vector<long long>& demand) {
  const int n_left = static_cast<int>(supply.size());
  const int n_right = static_cast<int>(demand.size());
  const int source = n_left + n_right;
  const int sink = source + 1;
  const int nodes = sink + 1;

  struct Arc {
    int to;
    long long cap;
    double cost;
    int rev;
  };
  std::vector<std::vector<Arc>> adj(static_cast<std::size_t>(nodes));
  auto add_arc = [&](int from, int to, long long cap, double c) {
    adj[static_cast<std::size_t>(from)].push_back(
        {to, cap, c, static_cast<int>(adj[static_cast<std::size_t>(to)].size())});
    adj[static_cast<std::size_t>(to)].push_back(
        {from, 0, -c, static_cast<int>(adj[static_cast<std::size_t>(from)].size()) - 1});
  };

  long long total = 0;
  for (int i = 0; i < n_left; ++i) {
    add_arc(source, i, supply[static_cast<std::size_t>(i)], 0.0);
    total += supply[static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < n_right; ++j) {
    add_arc(n_left + j, sink, demand[static_cast<std::size_t>(j)], 0.0);
  }
  for (int i = 0; i < n_left; ++i) {
    for (int j = 0; j < n_right; ++j) {
      add_arc(i, n_left + j, std::min(supply[static_cast<std::size_t>(i)],
                                      demand[static_cast<std::size_t>(j)]),
              cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }

  std::vector<double> potential(static_cast<std::size_t>(nodes), 0.0);
  double flow_cost = 0.0;
  long long flow = 0;

  while (flow < total) {
    // Dense Dijkstra with reduced costs.
    std::vector<double> dist(static_cast<std::size_t>(nodes),
                             std::numeric_limits<double>::infinity());
    std::vector<char> done(static_cast<std::size_t>(nodes), 0);
    std::vector<std::pair<int, int>> prev(static_cast<std::size_t>(nodes), {-1, -1});
    dist[static_cast<std::size_t>(source)] = 0.0;
    while (true) {
      int u = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int v = 0; v < nodes; ++v) {
        if (!done[static_cast<std::size_t>(v)] && dist[static_cast<std::size_t>(v)] < best) {
          best = dist[static_cast<std::size_t>(v)];
          u = v;
        }
      }
      if (u < 0) break;
      done[static_cast<std::size_t>(u)] = 1;
      for (std::size_t e = 0; e < adj[static_cast<std::size_t>(u)].size(); ++e) {
        const Arc& arc = adj[static_cast<std::size_t>(u)][e];
        if (arc.cap <= 0) continue;
        const double nd = dist[static_cast<std::size_t>(u)] + arc.cost +
                          potential[static_cast<std::size_t>(u)] -
                          potential[static_cast<std::size_t>(arc.to)];
        if (nd < dist[static_cast<std::size_t>(arc.to)] - 1e-15) {
          dist[static_cast<std::size_t>(arc.to)] = nd;
          prev[static_cast<std::size_t>(arc.to)] = {u, static_cast<int>(e)};
        }
      }
    }
    if (!std::isfinite(dist[static_cast<std::size_t>(sink)])) break;
    for (int v = 0; v < nodes; ++v) {
      if (std::isfinite(dist[static_cast<std::size_t>(v)])) {
        potential[static_cast<std::size_t>(v)] += dist[static_cast<std::size_t>(v)];
      }
    }
    long long push = total - flow;
    for (int v = sink; v != source;) {
      const auto [u, e] = prev[static_cast<std::size_t>(v)];
      push = std::min(push, adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(e)].cap);
      v = u;
    }
    for (int v = sink; v != source;) {
      const auto [u, e] = prev[static_cast<std::size_t>(v)];
      Arc& arc = adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(e)];
      arc.cap -= push;
      adj[static_cast<std::size_t>(arc.to)][static_cast<std::size_t>(arc.rev)].cap += push;
      flow_cost += arc.cost * static_cast<double>(push);
      v = u;
    }
    flow += push;
  }
  return flow_cost;
}

}  // namespace

double hausdorff_distance(const Net& n1, const Net& n2) {
  auto directed = [](const Net& from, const Net& to) {
    double worst = 0.0;
    for (const Pin& p : from.pins) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const Pin& q : to.pins) nearest = std::min(nearest, pin_distance(p, q));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(n1, n2), directed(n2, n1));
}

double earth_mover_distance(const Net& n1, const Net& n2) {
  const int a = static_cast<int>(n1.pins.size());
  const int b = static_cast<int>(n2.pins.size());
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(a),
                                        std::vector<double>(static_cast<std::size_t>(b)));
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) {
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          pin_distance(n1.pins[static_cast<std::size_t>(i)],
                       n2.pins[static_cast<std::size_t>(j)]);
    }
  }

  if (a == b) {
    // Min-cost bijection: unit supplies, result is the assignment sum.
    std::vector<long long> ones(static_cast<std::size_t>(a), 1);
    return min_cost_transport(cost, ones, ones);
  }
  // Uniform-mass optimal transport with exact rational masses: each left pin
  // carries L/a units, each right pin L/b units, one unit = 1/L mass.
  const long long lcm = static_cast<long long>(a) / gcd_ll(a, b) * b;
  std::vector<long long> supply(static_cast<std::size_t>(a), lcm / a);
  std::vector<long long> demand(static_cast<std::size_t>(b), lcm / b);
  return min_cost_transport(cost, supply, demand) / static_cast<double>(lcm);
}

NetDistanceMatrix net_distance_matrix(const Problem& problem, NetMetric metric,
                                      int workers) {
  const int m = problem.net_count();
  NetDistanceMatrix matrix;
  matrix.metric = metric;
  matrix.size = m;
  matrix.values.assign(static_cast<std::size_t>(m) * m, 0.0);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }

  int pool = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  if (pool < 1) pool = 1;
  pool = std::min<int>(pool, static_cast<int>(pairs.size()) > 0 ? static_cast<int>(pairs.size()) : 1);

  auto compute_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto [i, j] = pairs[p];
      const double d =
          metric == NetMetric::HD
              ? hausdorff_distance(problem.nets[static_cast<std::size_t>(i)],
                                   problem.nets[static_cast<std::size_t>(j)])
              : earth_mover_distance(problem.nets[static_cast<std::size_t>(i)],
                                     problem.nets[static_cast<std::size_t>(j)]);
      matrix.at(i, j) = d;
      matrix.at(j, i) = d;
    }
  };

  if (pool == 1 || pairs.size() < 2) {
    compute_range(0, pairs.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (pairs.size() + pool - 1) / pool;
    for (int t = 0; t < pool; ++t) {
      const std::size_t begin = static_cast<std::size_t>(t) * chunk;
      const std::size_t end = std::min(pairs.size(), begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(compute_range, begin, end);
    }
    for (auto& th : threads) th.join();
  }
  return matrix;
}

Dendrogram cluster(const NetDistanceMatrix& distances, Linkage linkage) {
  const int m = distances.size;
  if (m < 1) throw InputError("distance matrix is empty");

  Dendrogram dendro;
  dendro.leaves.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) dendro.leaves[static_cast<std::size_t>(i)] = i + 1;
  if (m == 1) return dendro;

  // Dissimilarity in inverse-distance space.
  std::vector<std::vector<double>> dis(static_cast<std::size_t>(m),
                                       std::vector<double>(static_cast<std::size_t>(m), 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const double d = distances.at(i, j);
      if (!(d > 0.0)) {
        throw CoincidentNetsError("nets " + std::to_string(i + 1) + " and " +
                                  std::to_string(j + 1) +
                                  " have zero distance; inverse is undefined");
      }
      dis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1.0 / d;
    }
  }

  struct Active {
    int cluster_id;  // 0..m-1 leaves, then m, m+1, ...
    int slot;        // row in dis
    int size;
  };
  std::vector<Active> active;
  active.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) active.push_back({i, i, 1});

  int next_id = m;
  while (active.size() > 1) {
    // Lowest dissimilarity; ties resolve to the lexicographically lowest
    // (cluster_id_a, cluster_id_b) pair, a < b.
    std::size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double d = dis[static_cast<std::size_t>(active[x].slot)]
                            [static_cast<std::size_t>(active[y].slot)];
        int lo = std::min(active[x].cluster_id, active[y].cluster_id);
        int hi = std::max(active[x].cluster_id, active[y].cluster_id);
        int cur_lo = std::min(active[best_a].cluster_id, active[best_b].cluster_id);
        int cur_hi = std::max(active[best_a].cluster_id, active[best_b].cluster_id);
        if (d < best || (d == best && std::make_pair(lo, hi) < std::make_pair(cur_lo, cur_hi))) {
          best = d;
          best_a = x;
          best_b = y;
        }
      }
    }

    const Active a = active[best_a];
    const Active b = active[best_b];
    dendro.merges.push_back({std::min(a.cluster_id, b.cluster_id),
                             std::max(a.cluster_id, b.cluster_id), best});

    // Lance-Williams update into slot a.
    for (const Active& other : active) {
      if (other.slot == a.slot || other.slot == b.slot) continue;
      const double da = dis[static_cast<std::size_t>(a.slot)][static_cast<std::size_t>(other.slot)];
      const double db = dis[static_cast<std::size_t>(b.slot)][static_cast<std::size_t>(other.slot)];
      double merged = 0.0;
      switch (linkage) {
        case Linkage::Average:
          merged = (a.size * da + b.size * db) / (a.size + b.size);
          break;
        case Linkage::Single:
          merged = std::min(da, db);
          break;
        case Linkage::Complete:
          merged = std::max(da, db);
          break;
      }
      dis[static_cast<std::size_t>(a.slot)][static_cast<std::size_t>(other.slot)] = merged;
      dis[static_cast<std::size_t>(other.slot)][static_cast<std::size_t>(a.slot)] = merged;
    }

    active[best_a] = {next_id++, a.slot, a.size + b.size};
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return dendro;
}

std::vector<int> assign_layers(const Dendrogram& dendrogram, int layer_count) {
  const int m = dendrogram.leaf_count();
  if (layer_count < 1 || layer_count > m) {
    throw InputError("layer count " + std::to_string(layer_count) + " outside 1.." +
                     std::to_string(m));
  }

  // Apply the first m - K merges; the remaining clusters are the layers.
  std::vector<int> owner(static_cast<std::size_t>(2 * m - 1));
  std::iota(owner.begin(), owner.end(), 0);
  auto find = [&](int x) {
    while (owner[static_cast<std::size_t>(x)] != x) {
      owner[static_cast<std::size_t>(x)] =
          owner[static_cast<std::size_t>(owner[static_cast<std::size_t>(x)])];
      x = owner[static_cast<std::size_t>(x)];
    }
    return x;
  };

  const int applied = m - layer_count;
  for (int t = 0; t < applied; ++t) {
    const auto& merge = dendrogram.merges[static_cast<std::size_t>(t)];
    const int root_a = find(merge.a);
    const int root_b = find(merge.b);
    const int merged_id = m + t;
    owner[static_cast<std::size_t>(root_a)] = merged_id;
    owner[static_cast<std::size_t>(root_b)] = merged_id;
  }

  // Group leaves by root, then number layers by smallest contained net id.
  std::vector<std::pair<int, int>> root_min;  // (root, min net id)
  std::vector<int> leaf_root(static_cast<std::size_t>(m));
  for (int leaf = 0; leaf < m; ++leaf) {
    const int root = find(leaf);
    leaf_root[static_cast<std::size_t>(leaf)] = root;
    bool seen = false;
    for (auto& [r, mn] : root_min) {
      if (r == root) {
        mn = std::min(mn, dendrogram.leaves[static_cast<std::size_t>(leaf)]);
        seen = true;
        break;
      }
    }
    if (!seen) root_min.emplace_back(root, dendrogram.leaves[static_cast<std::size_t>(leaf)]);
  }
  std::sort(root_min.begin(), root_min.end(),
            [](const auto& p1, const auto& p2) { return p1.second < p2.second; });

  std::vector<int> layer_of_root(static_cast<std::size_t>(2 * m - 1), 0);
  for (std::size_t l = 0; l < root_min.size(); ++l) {
    layer_of_root[static_cast<std::size_t>(root_min[l].first)] = static_cast<int>(l) + 1;
  }

  std::vector<int> assignment(static_cast<std::size_t>(m));
  for (int leaf = 0; leaf < m; ++leaf) {
    assignment[static_cast<std::size_t>(leaf)] =
        layer_of_root[static_cast<std::size_t>(leaf_root[static_cast<std::size_t>(leaf)])];
  }
  return assignment;
}

namespace {

std::vector<LayerSolve> solve_layers(const Problem& problem,
                                     const std::vector<int>& assignment, int layer_count,
                                     const MultilayerOptions& options, const GaConfig& ga,
                                     const TrainConfig& train_cfg, int trial_tag) {
  std::vector<LayerSolve> layers(static_cast<std::size_t>(layer_count));
  for (int layer = 1; layer <= layer_count; ++layer) {
    LayerSolve& ls = layers[static_cast<std::size_t>(layer - 1)];
    ls.layer = layer;
    ls.subproblem.board_width = problem.board_width;
    ls.subproblem.board_height = problem.board_height;
    ls.subproblem.grid_resolution = problem.grid_resolution;
    for (int leaf = 0; leaf < problem.net_count(); ++leaf) {
      if (assignment[static_cast<std::size_t>(leaf)] != layer) continue;
      Net net = problem.nets[static_cast<std::size_t>(leaf)];
      ls.net_ids.push_back(net.id);
      net.id = static_cast<int>(ls.subproblem.nets.size()) + 1;
      ls.subproblem.nets.push_back(std::move(net));
    }
  }

  // Layers run concurrently; each layer's GOMLP gets its own derived seed,
  // so results do not depend on scheduling.
  auto run_layer = [&](int idx) {
    LayerSolve& ls = layers[static_cast<std::size_t>(idx)];
    SolveOptions solve_options;
    solve_options.seed = derive_seed(options.seed, 0x14aa, trial_tag, idx);
    solve_options.time_budget_seconds = options.per_layer_budget_seconds;
    solve_options.workers = 1;  // concurrency lives at the layer level here
    solve_options.feature_expansion = options.feature_expansion;
    solve_options.distance_terms = options.distance_terms;
    ls.result = solve(ls.subproblem, ga, train_cfg, solve_options);
  };

  int pool = options.workers > 0 ? options.workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
  if (pool < 1) pool = 1;
  pool = std::min(pool, layer_count);

  if (pool == 1) {
    for (int i = 0; i < layer_count; ++i) run_layer(i);
  } else {
    std::vector<std::thread> threads;
    std::atomic<int> next{0};
    for (int t = 0; t < pool; ++t) {
      threads.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < layer_count; i = next.fetch_add(1)) run_layer(i);
      });
    }
    for (auto& th : threads) th.join();
  }
  return layers;
}

}  // namespace

MultilayerResult solve_multilayer(const Problem& problem, const MultilayerOptions& options,
                                  const GaConfig& ga, const TrainConfig& train_cfg) {
  const auto start = std::chrono::steady_clock::now();
  const int m = problem.net_count();

  MultilayerResult result;
  result.distances = net_distance_matrix(problem, options.metric, options.workers);
  result.dendrogram = cluster(result.distances, options.linkage);

  auto evaluate_assignment = [&](int layer_count, int trial_tag) {
    const auto assignment = assign_layers(result.dendrogram, layer_count);
    auto layers = solve_layers(problem, assignment, layer_count, options, ga, train_cfg,
                               trial_tag);
    McdlTrial trial;
    trial.layer_count = layer_count;
    trial.all_desirable = true;
    for (const auto& ls : layers) {
      trial.layer_ei.push_back(ls.result.ei);
      trial.layer_feasible.push_back(ls.result.feasible);
      trial.all_desirable =
          trial.all_desirable && ls.result.feasible && ls.result.ei == 0;
    }
    return std::make_tuple(assignment, std::move(layers), trial);
  };

  if (options.layer_count.has_value()) {
    const int layer_count = *options.layer_count;
    auto [assignment, layers, trial] = evaluate_assignment(layer_count, layer_count);
    result.assignment = assignment;
    result.layers_used = layer_count;
    result.trials.push_back(trial);
    result.layer_results = std::move(layers);
  } else {
    result.mcdl_search = true;
    int best_k = 0;
    int best_bad = std::numeric_limits<int>::max();
    for (int layer_count = 1; layer_count <= m; ++layer_count) {
      auto [assignment, layers, trial] = evaluate_assignment(layer_count, layer_count);
      result.trials.push_back(trial);
      int bad = 0;
      for (std::size_t l = 0; l < trial.layer_ei.size(); ++l) {
        if (!trial.layer_feasible[l] || trial.layer_ei[l] != 0) ++bad;
      }
      if (trial.all_desirable) {
        result.mcdl_determined = true;
        result.mcdl = layer_count;
        result.assignment = assignment;
        result.layers_used = layer_count;
        result.layer_results = std::move(layers);
        break;
      }
      if (bad < best_bad) {
        best_bad = bad;
        best_k = layer_count;
        result.assignment = assignment;
        result.layers_used = layer_count;
        result.layer_results = std::move(layers);
      }
    }
    if (!result.mcdl_determined) {
      result.mcdl = best_k;  // best K found, reported as undetermined
    }
  }

  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace pplane
