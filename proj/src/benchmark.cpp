#include "pplane/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "pplane/astar.hpp"
#include "pplane/gomlp.hpp"

namespace pplane {

namespace {

// Continued-fraction kernel for the regularized incomplete beta.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEpsilon = 3e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEpsilon) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double sign_test_p_value(int plus, int minus) {
  const int n = plus + minus;
  if (n == 0) return 1.0;
  const int k = std::min(plus, minus);
  // Exact tail: P(X <= k) for X ~ Bin(n, 1/2), via log binomials.
  double tail = 0.0;
  for (int i = 0; i <= k; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                            std::lgamma(n - i + 1.0) - n * std::log(2.0);
    tail += std::exp(log_term);
  }
  return std::min(1.0, 2.0 * tail);
}

double paired_t_test_p_value(const std::vector<double>& differences, double* t_statistic) {
  if (t_statistic) *t_statistic = 0.0;
  const std::size_t n = differences.size();
  if (n < 2) return 1.0;
  double mean = 0.0;
  for (double d : differences) mean += d;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double d : differences) var += (d - mean) * (d - mean);
  var /= static_cast<double>(n - 1);
  if (var == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double t = mean / std::sqrt(var / static_cast<double>(n));
  if (t_statistic) *t_statistic = t;
  const double df = static_cast<double>(n - 1);
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

void aggregate_rows(BenchmarkReport& report) {
  report.wins = report.ties = report.losses = report.failures = 0;
  std::vector<double> differences;  // ei_astar - ei_gomlp, positive favors GOMLP
  int plus = 0, minus = 0;
  for (const auto& row : report.rows) {
    if (row.failed) {
      ++report.failures;
      continue;
    }
    if (row.ei_gomlp < row.ei_astar) {
      ++report.wins;
      ++plus;
    } else if (row.ei_gomlp > row.ei_astar) {
      ++report.losses;
      ++minus;
    } else {
      ++report.ties;
    }
    differences.push_back(static_cast<double>(row.ei_astar - row.ei_gomlp));
  }
  const int counted = report.wins + report.ties + report.losses;
  report.win_or_tie_rate =
      counted > 0 ? static_cast<double>(report.wins + report.ties) / counted : 0.0;
  report.sign_test_p = sign_test_p_value(plus, minus);
  report.t_test_p = paired_t_test_p_value(differences, &report.t_statistic);
}

BenchmarkReport run_benchmark(const std::vector<std::pair<std::string, Problem>>& problems,
                              const BenchmarkConfig& config) {
  BenchmarkReport report;
  report.rows.resize(problems.size());

  auto run_one = [&](std::size_t index) {
    BenchmarkRow& row = report.rows[index];
    const auto& [id, problem] = problems[index];
    row.problem_id = id;
    row.net_count = problem.net_count();
    row.seed = derive_seed(config.seed, 0xbe9c, index);
    try {
      SolveOptions options;
      options.seed = row.seed;
      options.time_budget_seconds = config.per_problem_budget_seconds;
      options.workers = config.solver_workers;
      const GomlpResult gomlp = solve(problem, config.ga, config.train, options);
      row.ei_gomlp = gomlp.ei;
      row.feasible_gomlp = gomlp.feasible;
      row.wall_gomlp = gomlp.wall_time_seconds;

      const AstarResult astar = solve_astar(problem);
      row.ei_astar = astar.ei;
      row.feasible_astar = astar.feasible;
      row.wall_astar = astar.wall_time_seconds;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  };

  const int workers = std::max(1, config.problem_workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < problems.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < problems.size(); i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // The paper presents rows in ascending order of the evolutionary result.
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const BenchmarkRow& a, const BenchmarkRow& b) {
                     if (a.ei_gomlp != b.ei_gomlp) return a.ei_gomlp < b.ei_gomlp;
                     return a.problem_id < b.problem_id;
                   });
  aggregate_rows(report);
  return report;
}

Json benchmark_report_to_json(const BenchmarkReport& report, const BenchmarkConfig& config) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r{{"problem_id", row.problem_id},
           {"net_count", row.net_count},
           {"ei_gomlp", row.ei_gomlp},
           {"ei_astar", row.ei_astar},
           {"feasible_gomlp", row.feasible_gomlp},
           {"feasible_astar", row.feasible_astar},
           {"seed", row.seed},
           {"wall_time_gomlp", row.wall_gomlp},
           {"wall_time_astar", row.wall_astar}};
    if (row.failed) {
      r["failed"] = true;
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "benchmark-report";
  doc["config"] = Json{{"seed", config.seed},
                       {"per_problem_budget_seconds", config.per_problem_budget_seconds},
                       {"ga", Json{{"population_size", config.ga.population_size},
                                   {"generations", config.ga.generations},
                                   {"elite_size", config.ga.elite_size},
                                   {"mutation_rate", config.ga.mutation_rate},
                                   {"crossover_swap_probability",
                                    config.ga.crossover_swap_probability}}},
                       {"train", Json{{"learning_rate", config.train.learning_rate},
                                      {"max_epochs", config.train.max_epochs}}}};
  doc["rows"] = std::move(rows);
  doc["aggregates"] = Json{{"problems", report.rows.size()},
                           {"wins", report.wins},
                           {"ties", report.ties},
                           {"losses", report.losses},
                           {"failures", report.failures},
                           {"win_or_tie_rate", report.win_or_tie_rate},
                           {"sign_test_p", report.sign_test_p},
                           {"t_test_p", report.t_test_p},
                           {"t_statistic", report.t_statistic}};
  return doc;
}

}  // namespace pplane
