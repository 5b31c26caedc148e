#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pplane/geometry.hpp"
#include "pplane/rng.hpp"

namespace pplane {

/// Flat vector of 2*k*m genes in [0,1]: m contiguous blocks of k (x, y)
/// handle pairs, block i holding the handles of net id i+1.
using Chromosome = std::vector<double>;

struct GaConfig {
  int population_size = 30;
  int generations = 20;
  int elite_size = 10;
  double mutation_rate = 0.05;              // per gene
  double crossover_swap_probability = 0.5;  // per (x, y) handle pair
  std::uint64_t rng_seed = 0;
};

/// Handles per net: k = ceil(2 * total_pins / m), at least 1.
int handle_count(const Problem& problem);

/// Roulette weights: fitness shifted positive, f - min(f) + 1e-6.
/// Equal fitnesses degrade to uniform selection.
std::vector<double> selection_weights(const std::vector<double>& fitnesses);

/// Fitness-proportional draw over positive weights.
std::size_t pick_index(const std::vector<double>& weights, RandomStream& rng);

/// Probabilistic random swap at (x, y) pair granularity: each of the k*m
/// handle pairs is exchanged between the two children with swap_probability.
std::pair<Chromosome, Chromosome> crossover_swap_pairs(const Chromosome& parent_a,
                                                       const Chromosome& parent_b,
                                                       double swap_probability,
                                                       RandomStream& rng);

/// Uniform mutation: each gene is resampled from [0,1) with mutation_rate.
void mutate_uniform(Chromosome& chromosome, double mutation_rate, RandomStream& rng);

/// Population container with the evolution step. Fitness evaluation stays
/// outside (the solver runs it in parallel); evolve() is sequential and
/// deterministic per seed.
class GaEngine {
 public:
  GaEngine(const GaConfig& config, int handles_per_net, int net_count);

  const std::vector<Chromosome>& population() const { return population_; }
  const GaConfig& config() const { return config_; }
  int gene_count() const { return gene_count_; }

  /// Replace the population: top elite_size by fitness copied unchanged,
  /// the rest bred by fitness-proportional selection, pair-swap crossover
  /// and uniform mutation.
  void evolve(const std::vector<double>& fitnesses);

 private:
  GaConfig config_;
  int gene_count_ = 0;
  RandomStream rng_;
  std::vector<Chromosome> population_;
};

/// M random chromosomes, genes i.i.d. uniform on [0,1), deterministic per
/// config seed.
std::vector<Chromosome> initialize_population(const GaConfig& config, int handles_per_net,
                                              int net_count);

/// Indices sorted by descending fitness, ties by ascending index.
std::vector<std::size_t> rank_by_fitness(const std::vector<double>& fitnesses);

}  // namespace pplane
