#include "pplane/gomlp.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace pplane {

namespace {

using Clock = std::chrono::steady_clock;

struct Evaluation {
  double fitness = 0.0;
  FitnessBreakdown breakdown;
  Grid grid;
  std::vector<std::vector<Island>> islands;
  int ei = 0;  // sum(s_i) - m, 0 islands counting as 0
  bool feasible = false;
  bool evaluated = false;
};

std::vector<TrainingPoint> pin_points(const Problem& problem) {
  std::vector<TrainingPoint> points;
  points.reserve(static_cast<std::size_t>(problem.total_pins()));
  for (const auto& net : problem.nets) {
    for (const auto& pin : net.pins) {
      points.push_back({pin.x, pin.y, net.id});
    }
  }
  return points;
}

void append_handles(std::vector<TrainingPoint>& points, const Chromosome& chromosome,
                    int handles_per_net, int net_count) {
  for (int net = 0; net < net_count; ++net) {
    const std::size_t block = static_cast<std::size_t>(2 * handles_per_net) * net;
    for (int h = 0; h < handles_per_net; ++h) {
      points.push_back({chromosome[block + 2 * h], chromosome[block + 2 * h + 1], net + 1});
    }
  }
}

int island_total(const std::vector<std::vector<Island>>& islands) {
  int total = 0;
  for (const auto& per_net : islands) total += static_cast<int>(per_net.size());
  return total;
}

bool all_nets_present(const std::vector<std::vector<Island>>& islands) {
  for (const auto& per_net : islands)
    if (per_net.empty()) return false;
  return true;
}

Evaluation evaluate_candidate(const Problem& problem,
                              const std::vector<TrainingPoint>& points,
                              const TrainConfig& train_cfg, std::uint64_t mlp_seed,
                              const Eigen::MatrixXd& grid_features,
                              const FitnessOptions& fit_options, double pin_penalty,
                              bool feature_expansion) {
  Evaluation ev;
  const MlpClassifier net =
      train(points, problem.net_count(), train_cfg, mlp_seed, feature_expansion);
  ev.grid = predict_grid(net, grid_features, problem.grid_resolution);
  ev.islands = extract_islands(ev.grid, problem.net_count());
  const auto report = check_feasible(problem, ev.grid);
  ev.feasible = report.feasible() && all_nets_present(ev.islands);
  ev.ei = island_total(ev.islands) - problem.net_count();
  ev.breakdown = fitness_from_islands(ev.islands, report.misclassified_count(),
                                      pin_penalty, fit_options);
  ev.fitness = ev.breakdown.total;
  ev.evaluated = true;
  return ev;
}

struct BestTracker {
  bool valid = false;
  double fitness = 0.0;
  int generation = 0;
  int member = 0;
  Evaluation eval;
  Chromosome chromosome;

  // Deterministic preference: higher fitness, then earlier generation, then
  // lower member index.
  void offer(const Evaluation& candidate, const Chromosome& chromo, int gen, int idx) {
    if (!candidate.evaluated) return;
    if (valid && candidate.fitness <= fitness) return;
    valid = true;
    fitness = candidate.fitness;
    generation = gen;
    member = idx;
    eval = candidate;
    chromosome = chromo;
  }
};

GomlpResult finalize(const Problem& problem, BestTracker&& best,
                     std::vector<GenerationStats>&& history,
                     std::vector<std::pair<int, Partition>>&& snapshots,
                     int generations_evaluated, bool timed_out, double wall_seconds) {
  GomlpResult result;
  result.fitness_history = std::move(history);
  result.generations_evaluated = generations_evaluated;
  result.timed_out = timed_out;
  result.wall_time_seconds = wall_seconds;
  result.snapshots = std::move(snapshots);
  if (best.valid) {
    result.best_partition.grid = std::move(best.eval.grid);
    result.best_partition.islands = std::move(best.eval.islands);
    result.best_chromosome = std::move(best.chromosome);
    result.best_breakdown = best.eval.breakdown;
    result.ei = best.eval.ei;
    result.feasible = best.eval.feasible;
  } else {
    result.best_partition.grid = Grid(problem.grid_resolution, 0);
    result.best_partition.islands.resize(problem.nets.size());
    result.ei = 0;
    result.feasible = false;
  }
  return result;
}

}  // namespace

GomlpResult solve(const Problem& problem, const GaConfig& ga, const TrainConfig& train_cfg,
                  const SolveOptions& options) {
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(options.time_budget_seconds));
  if (!(options.time_budget_seconds > 0.0)) {
    throw InputError("time budget must be positive");
  }

  const int m = problem.net_count();
  const int k = handle_count(problem);

  GaConfig ga_used = ga;
  ga_used.rng_seed = derive_seed(options.seed, 0x9a5eed);
  GaEngine engine(ga_used, k, m);

  const Eigen::MatrixXd grid_features =
      grid_feature_matrix(problem.grid_resolution, options.feature_expansion);
  const std::vector<TrainingPoint> pins = pin_points(problem);
  const double pin_penalty = default_pin_penalty(problem);
  FitnessOptions fit_options;
  fit_options.distance_terms = options.distance_terms;

  int workers = options.workers > 0
                    ? options.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, ga_used.population_size);

  BestTracker best;
  std::vector<GenerationStats> history;
  std::vector<std::pair<int, Partition>> snapshots;
  bool timed_out = false;
  int generations_evaluated = 0;

  const int population = ga_used.population_size;
  std::vector<Evaluation> evals(population);

  for (int generation = 0; generation <= ga_used.generations; ++generation) {
    if (generation > 0 && Clock::now() >= deadline) break;

    for (auto& ev : evals) ev = Evaluation{};
    const auto& pop = engine.population();

    auto eval_member = [&](int idx) {
      // The very first candidate always runs so a budget too small for one
      // evaluation still yields a partial result.
      if (!(generation == 0 && idx == 0) && Clock::now() >= deadline) return;
      std::vector<TrainingPoint> points = pins;
      append_handles(points, pop[static_cast<std::size_t>(idx)], k, m);
      evals[static_cast<std::size_t>(idx)] = evaluate_candidate(
          problem, points, train_cfg, derive_seed(options.seed, 1, generation, idx),
          grid_features, fit_options, pin_penalty, options.feature_expansion);
    };

    if (workers == 1) {
      for (int i = 0; i < population; ++i) eval_member(i);
    } else {
      std::atomic<int> next_index{0};
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
          for (int i = next_index.fetch_add(1); i < population;
               i = next_index.fetch_add(1)) {
            eval_member(i);
          }
        });
      }
      for (auto& thread : pool) thread.join();
    }

    const bool complete =
        std::all_of(evals.begin(), evals.end(), [](const Evaluation& e) { return e.evaluated; });

    if (!complete) {
      // Partial round: only useful when nothing complete exists yet.
      if (generations_evaluated == 0) {
        for (int i = 0; i < population; ++i) {
          best.offer(evals[static_cast<std::size_t>(i)], pop[static_cast<std::size_t>(i)],
                     generation, i);
        }
        timed_out = true;
      }
      break;
    }

    double sum = 0.0;
    double gen_best = evals[0].fitness;
    for (int i = 0; i < population; ++i) {
      sum += evals[static_cast<std::size_t>(i)].fitness;
      gen_best = std::max(gen_best, evals[static_cast<std::size_t>(i)].fitness);
      best.offer(evals[static_cast<std::size_t>(i)], pop[static_cast<std::size_t>(i)],
                 generation, i);
    }
    history.push_back({gen_best, sum / population});
    ++generations_evaluated;

    if (options.snapshots) {
      snapshots.emplace_back(generation,
                             Partition{best.eval.grid, best.eval.islands});
    }

    if (best.valid && best.eval.feasible && best.eval.ei == 0) break;  // early success
    if (generation == ga_used.generations) break;

    std::vector<double> fitnesses(population);
    for (int i = 0; i < population; ++i) {
      fitnesses[static_cast<std::size_t>(i)] = evals[static_cast<std::size_t>(i)].fitness;
    }
    engine.evolve(fitnesses);
  }

  const double wall =
      std::chrono::duration<double>(Clock::now() - start).count();
  return finalize(problem, std::move(best), std::move(history), std::move(snapshots),
                  generations_evaluated, timed_out, wall);
}

GomlpResult solve_mlp_only(const Problem& problem, const TrainConfig& train_cfg,
                           const SolveOptions& options) {
  const auto start = Clock::now();
  const Eigen::MatrixXd grid_features =
      grid_feature_matrix(problem.grid_resolution, options.feature_expansion);
  FitnessOptions fit_options;
  fit_options.distance_terms = options.distance_terms;

  Evaluation ev = evaluate_candidate(problem, pin_points(problem), train_cfg,
                                     derive_seed(options.seed, 1, 0, 0), grid_features,
                                     fit_options, default_pin_penalty(problem),
                                     options.feature_expansion);

  BestTracker best;
  best.offer(ev, Chromosome{}, 0, 0);
  std::vector<GenerationStats> history{{ev.fitness, ev.fitness}};
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  return finalize(problem, std::move(best), std::move(history), {}, 1, false, wall);
}

}  // namespace pplane
