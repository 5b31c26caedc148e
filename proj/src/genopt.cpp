#include "pplane/genopt.hpp"

#include <algorithm>
#include <numeric>

namespace pplane {

namespace {
constexpr double kWeightShift = 1e-6;
}

int handle_count(const Problem& problem) {
  const int m = problem.net_count();
  if (m < 1) throw InputError("handle_count needs at least one net");
  const int num = 2 * problem.total_pins();
  const int k = num / m + (num % m != 0 ? 1 : 0);
  return k < 1 ? 1 : k;
}

std::vector<double> selection_weights(const std::vector<double>& fitnesses) {
  const double min_fit = *std::min_element(fitnesses.begin(), fitnesses.end());
  std::vector<double> weights(fitnesses.size());
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    weights[i] = fitnesses[i] - min_fit + kWeightShift;
  }
  return weights;
}

std::size_t pick_index(const std::vector<double>& weights, RandomStream& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  return weights.size() - 1;  // guard against accumulated rounding
}

std::pair<Chromosome, Chromosome> crossover_swap_pairs(const Chromosome& parent_a,
                                                       const Chromosome& parent_b,
                                                       double swap_probability,
                                                       RandomStream& rng) {
  Chromosome child_a = parent_a;
  Chromosome child_b = parent_b;
  const std::size_t pairs = parent_a.size() / 2;
  for (std::size_t p = 0; p < pairs; ++p) {
    if (rng.bernoulli(swap_probability)) {
      std::swap(child_a[2 * p], child_b[2 * p]);
      std::swap(child_a[2 * p + 1], child_b[2 * p + 1]);
    }
  }
  return {std::move(child_a), std::move(child_b)};
}

void mutate_uniform(Chromosome& chromosome, double mutation_rate, RandomStream& rng) {
  for (double& gene : chromosome) {
    if (rng.bernoulli(mutation_rate)) gene = rng.uniform();
  }
}

std::vector<std::size_t> rank_by_fitness(const std::vector<double>& fitnesses) {
  std::vector<std::size_t> order(fitnesses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fitnesses[a] > fitnesses[b];
  });
  return order;
}

GaEngine::GaEngine(const GaConfig& config, int handles_per_net, int net_count)
    : config_(config),
      gene_count_(2 * handles_per_net * net_count),
      rng_(derive_seed(config.rng_seed, 0x6741)) {
  if (config_.population_size < 1) throw InputError("population_size must be >= 1");
  if (config_.elite_size < 0 || config_.elite_size >= config_.population_size) {
    throw InputError("elite_size must be in [0, population_size)");
  }
  if (handles_per_net < 1 || net_count < 1) {
    throw InputError("handles_per_net and net_count must be >= 1");
  }
  population_.resize(config_.population_size);
  for (auto& chromo : population_) {
    chromo.resize(gene_count_);
    for (double& gene : chromo) gene = rng_.uniform();
  }
}

void GaEngine::evolve(const std::vector<double>& fitnesses) {
  if (fitnesses.size() != population_.size()) {
    throw InputError("fitness count does not match population size");
  }
  const auto order = rank_by_fitness(fitnesses);
  std::vector<Chromosome> next;
  next.reserve(population_.size());
  for (int e = 0; e < config_.elite_size; ++e) {
    next.push_back(population_[order[static_cast<std::size_t>(e)]]);
  }

  const auto weights = selection_weights(fitnesses);
  while (next.size() < population_.size()) {
    const std::size_t a = pick_index(weights, rng_);
    const std::size_t b = pick_index(weights, rng_);
    auto [child_a, child_b] = crossover_swap_pairs(
        population_[a], population_[b], config_.crossover_swap_probability, rng_);
    mutate_uniform(child_a, config_.mutation_rate, rng_);
    mutate_uniform(child_b, config_.mutation_rate, rng_);
    next.push_back(std::move(child_a));
    if (next.size() < population_.size()) next.push_back(std::move(child_b));
  }
  population_ = std::move(next);
}

std::vector<Chromosome> initialize_population(const GaConfig& config, int handles_per_net,
                                              int net_count) {
  return GaEngine(config, handles_per_net, net_count).population();
}

}  // namespace pplane
