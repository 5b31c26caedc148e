#pragma once

#include <cstdint>
#include <vector>

#include "pplane/geometry.hpp"

namespace pplane {

/// Knobs for the synthetic benchmark generator. interleave_factor is the
/// difficulty proxy: the probability that a net is split into two clusters
/// flanking another net's cluster, which forces split-island pressure.
struct SyntheticSpec {
  int net_count = 5;  // 2..20
  int pins_per_net_min = 3;
  int pins_per_net_max = 6;
  double cluster_spread = 0.035;  // pin scatter (normalized units)
  double interleave_factor = 0.3;
  std::uint64_t rng_seed = 0;
  double board_size = 100.0;  // physical extent of the square board
  int grid_resolution = 100;
};

/// Deterministic per seed. Every generated problem passes ingestion
/// validation. Throws GenerationStuckError when rejection sampling cannot
/// satisfy the spec within bounded retries.
std::vector<Problem> generate_problems(const SyntheticSpec& spec, int count);

/// Single problem at a given index of the spec's stream.
Problem generate_problem(const SyntheticSpec& spec, int index);

}  // namespace pplane
