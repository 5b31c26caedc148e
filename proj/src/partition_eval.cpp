#include "pplane/partition_eval.hpp"

#include <cmath>
#include <limits>

namespace pplane {

namespace {

// King-move neighborhood.
constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

int k_from_pins(int m, int total_pins) {
  const int num = 2 * total_pins;
  int k = num / m + (num % m != 0 ? 1 : 0);
  return k < 1 ? 1 : k;
}

}  // namespace

std::vector<std::vector<Island>> extract_islands(const Grid& grid, int net_count) {
  const int res = grid.resolution;
  std::vector<std::vector<Island>> islands(net_count);
  std::vector<char> visited(grid.cell_count(), 0);
  std::vector<int> stack;

  for (int r = 0; r < res; ++r) {
    for (int c = 0; c < res; ++c) {
      const std::size_t start = static_cast<std::size_t>(r) * res + c;
      if (visited[start]) continue;
      const int label = grid.labels[start];
      visited[start] = 1;
      if (label < 1 || label > net_count) continue;  // foreign labels are skipped

      Island island;
      island.net_id = label;
      island.resolution = res;
      stack.assign(1, static_cast<int>(start));
      double sum_x = 0.0, sum_y = 0.0;
      while (!stack.empty()) {
        const int cell = stack.back();
        stack.pop_back();
        const int cr = cell / res;
        const int cc = cell % res;
        island.cells.emplace_back(cr, cc);
        sum_x += cell_center(cc, res);
        sum_y += cell_center(cr, res);
        bool on_boundary = false;
        for (int d = 0; d < 8; ++d) {
          const int nr = cr + kDr[d];
          const int nc = cc + kDc[d];
          if (nr < 0 || nr >= res || nc < 0 || nc >= res) {
            on_boundary = true;
            continue;
          }
          const std::size_t ni = static_cast<std::size_t>(nr) * res + nc;
          if (grid.labels[ni] != label) {
            on_boundary = true;
          } else if (!visited[ni]) {
            visited[ni] = 1;
            stack.push_back(static_cast<int>(ni));
          }
        }
        if (on_boundary) island.boundary.emplace_back(cr, cc);
      }
      island.centroid_x = sum_x / island.cells.size();
      island.centroid_y = sum_y / island.cells.size();
      islands[label - 1].push_back(std::move(island));
    }
  }
  return islands;
}

Partition make_partition(const Grid& grid, int net_count) {
  Partition p;
  p.grid = grid;
  p.islands = extract_islands(p.grid, net_count);
  return p;
}

Partition make_partition(Grid&& grid, int net_count) {
  Partition p;
  p.grid = std::move(grid);
  p.islands = extract_islands(p.grid, net_count);
  return p;
}

double island_min_distance(const Island& a, const Island& b) {
  const int res = a.resolution;
  double best_sq = std::numeric_limits<double>::infinity();
  for (const auto& [ar, ac] : a.boundary) {
    const double ax = cell_center(ac, res);
    const double ay = cell_center(ar, res);
    for (const auto& [br, bc] : b.boundary) {
      const double dx = ax - cell_center(bc, res);
      const double dy = ay - cell_center(br, res);
      const double d = dx * dx + dy * dy;
      if (d < best_sq) best_sq = d;
    }
  }
  return std::sqrt(best_sq);
}

double island_centroid_distance(const Island& a, const Island& b) {
  const double dx = a.centroid_x - b.centroid_x;
  const double dy = a.centroid_y - b.centroid_y;
  return std::sqrt(dx * dx + dy * dy);
}

double default_pin_penalty(const Problem& problem) {
  const int m = problem.net_count();
  const int k = k_from_pins(m, problem.total_pins());
  return 10.0 * (m + std::sqrt(2.0) * m * k);
}

FitnessBreakdown fitness_from_islands(const std::vector<std::vector<Island>>& islands,
                                      int misclassified_pins, double penalty_per_pin,
                                      const FitnessOptions& options) {
  FitnessBreakdown fb;
  int total_islands = 0;
  double dmin_sum = 0.0;
  double dcent_sum = 0.0;
  for (const auto& net_islands : islands) {
    total_islands += static_cast<int>(net_islands.size());
    if (!options.distance_terms) continue;
    for (std::size_t a = 0; a < net_islands.size(); ++a) {
      for (std::size_t b = a + 1; b < net_islands.size(); ++b) {
        dmin_sum += island_min_distance(net_islands[a], net_islands[b]);
        dcent_sum += island_centroid_distance(net_islands[a], net_islands[b]);
      }
    }
  }
  fb.f_island = -options.island_weight * total_islands;
  if (options.distance_terms) {
    fb.f_dmin = -options.dmin_weight * dmin_sum;
    fb.f_dcent = -options.dcent_weight * dcent_sum;
  }
  fb.feasibility_penalty = -penalty_per_pin * misclassified_pins;
  fb.total = fb.f_island + fb.f_dmin + fb.f_dcent + fb.feasibility_penalty;
  return fb;
}

FitnessBreakdown fitness(const Problem& problem, const Grid& grid,
                         const FitnessOptions& options) {
  const auto islands = extract_islands(grid, problem.net_count());
  const auto report = check_feasible(problem, grid);
  const double penalty =
      options.penalty_per_pin < 0.0 ? default_pin_penalty(problem) : options.penalty_per_pin;
  return fitness_from_islands(islands, report.misclassified_count(), penalty, options);
}

}  // namespace pplane
