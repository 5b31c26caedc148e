#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pplane/genopt.hpp"
#include "pplane/geometry.hpp"
#include "pplane/neural.hpp"
#include "pplane/partition_eval.hpp"

namespace pplane {

struct SolveOptions {
  std::uint64_t seed = 0;             // master run seed; every stream derives from it
  double time_budget_seconds = 60.0;
  int workers = 0;                    // 0 -> hardware concurrency
  bool snapshots = false;             // keep the elite partition per generation
  bool feature_expansion = true;      // off: raw (x, y) input, width 2
  bool distance_terms = true;         // off: f_dmin = f_dcent = 0
};

struct GenerationStats {
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
};

struct GomlpResult {
  Partition best_partition;
  Chromosome best_chromosome;  // empty for the MLP-only ablation
  FitnessBreakdown best_breakdown;
  std::vector<GenerationStats> fitness_history;  // entry per evaluated generation
  // sum(s_i) - m of the best partition. Negative only in the degenerate
  // infeasible case where a net owns no cells at all.
  int ei = 0;
  bool feasible = false;
  bool timed_out = false;  // budget died before the first full evaluation round
  int generations_evaluated = 0;
  double wall_time_seconds = 0.0;
  std::vector<std::pair<int, Partition>> snapshots;  // (generation, elite partition)
};

/// The nested loop: per generation and chromosome, fit an MLP to pins plus
/// handles, classify the grid, score islands and feasibility, then evolve.
/// Stops at ga.generations evolution steps, at the first feasible EI = 0
/// candidate, or at the time budget, whichever comes first. Population
/// members are evaluated concurrently; results are identical regardless of
/// evaluation order because each member's MLP seed derives from
/// (seed, generation, member index).
GomlpResult solve(const Problem& problem, const GaConfig& ga, const TrainConfig& train,
                  const SolveOptions& options = {});

/// Ablation baseline: one MLP trained on pins only, no handles, no evolution.
GomlpResult solve_mlp_only(const Problem& problem, const TrainConfig& train,
                           const SolveOptions& options = {});

}  // namespace pplane
