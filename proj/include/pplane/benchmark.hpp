#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pplane/genopt.hpp"
#include "pplane/geometry.hpp"
#include "pplane/neural.hpp"
#include "pplane/problem_io.hpp"

namespace pplane {

struct BenchmarkRow {
  std::string problem_id;
  int net_count = 0;
  int ei_gomlp = 0;
  int ei_astar = 0;
  bool feasible_gomlp = false;
  bool feasible_astar = false;
  double wall_gomlp = 0.0;
  double wall_astar = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;  // solver crash; excluded from aggregates
  std::string error;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;  // ascending by ei_gomlp, ties by problem id
  int wins = 0;    // ei_gomlp < ei_astar
  int ties = 0;
  int losses = 0;
  int failures = 0;
  double win_or_tie_rate = 0.0;
  double sign_test_p = 1.0;
  double t_test_p = 1.0;
  double t_statistic = 0.0;
};

/// Exact two-sided binomial sign test at p = 1/2 on (plus, minus) counts,
/// ties already dropped.
double sign_test_p_value(int plus, int minus);

/// Two-sided paired t-test p-value for the given differences.
/// Degenerate inputs (n < 2, zero variance) return 1.0 or 0.0 as appropriate.
double paired_t_test_p_value(const std::vector<double>& differences,
                             double* t_statistic = nullptr);

/// Regularized incomplete beta I_x(a, b); the t CDF plumbs through this.
double incomplete_beta(double a, double b, double x);

struct BenchmarkConfig {
  GaConfig ga;
  TrainConfig train;
  double per_problem_budget_seconds = 60.0;
  std::uint64_t seed = 0;
  int problem_workers = 1;  // problems run concurrently up to this limit
  int solver_workers = 0;   // inner GOMLP pool, 0 -> hardware concurrency
};

/// Run GOMLP and the A* baseline on every problem with the same budget and
/// per-problem derived seeds, then aggregate the paired comparison.
/// Crashing rows are flagged and excluded from the aggregates.
BenchmarkReport run_benchmark(const std::vector<std::pair<std::string, Problem>>& problems,
                              const BenchmarkConfig& config);

Json benchmark_report_to_json(const BenchmarkReport& report, const BenchmarkConfig& config);

/// Recompute aggregates from rows (used by tests for self-consistency and by
/// run_benchmark itself).
void aggregate_rows(BenchmarkReport& report);

}  // namespace pplane
