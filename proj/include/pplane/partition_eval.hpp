#pragma once

#include <vector>

#include "pplane/geometry.hpp"

namespace pplane {

/// Per-term fitness report. All terms are <= 0 and total is their sum, so a
/// feasible partition with one island per net scores exactly -m.
struct FitnessBreakdown {
  double f_island = 0.0;             // -(sum of island counts), weighted
  double f_dmin = 0.0;               // -(sum of pairwise min island distances)
  double f_dcent = 0.0;              // -(sum of pairwise centroid distances)
  double feasibility_penalty = 0.0;  // -penalty_per_pin per misclassified pin
  double total = 0.0;
};

struct FitnessOptions {
  bool distance_terms = true;  // when false, f_dmin and f_dcent are exactly 0
  double island_weight = 1.0;
  double dmin_weight = 1.0;
  double dcent_weight = 1.0;
  // Penalty per misclassified pin; negative means "derive the default",
  // 10 * (m + sqrt(2) * m * k), which ranks every infeasible candidate below
  // every feasible one.
  double penalty_per_pin = -1.0;
};

/// 8-connected components per net. islands[i] holds the islands of net id i+1,
/// each with cells, boundary cells and centroid populated.
std::vector<std::vector<Island>> extract_islands(const Grid& grid, int net_count);

/// Convenience: label grid plus its islands.
Partition make_partition(const Grid& grid, int net_count);
Partition make_partition(Grid&& grid, int net_count);

/// Minimum Euclidean distance between cell centers of two islands, in
/// normalized board units. Exact: the minimizing pair always lies on the
/// island boundaries, which is what gets scanned.
double island_min_distance(const Island& a, const Island& b);

/// Euclidean distance between island centroids.
double island_centroid_distance(const Island& a, const Island& b);

double default_pin_penalty(const Problem& problem);

/// The full fitness of a label grid for a problem. Higher is better; sums run
/// over unordered island pairs of each net, counted once.
FitnessBreakdown fitness(const Problem& problem, const Grid& grid,
                         const FitnessOptions& options = {});

/// Fitness terms of pre-extracted islands; lets the solver reuse the islands
/// it already needs for EI tracking. misclassified_pins feeds the penalty.
FitnessBreakdown fitness_from_islands(const std::vector<std::vector<Island>>& islands,
                                      int misclassified_pins,
                                      double penalty_per_pin,
                                      const FitnessOptions& options = {});

}  // namespace pplane
