#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pplane/benchmark.hpp"
#include "pplane/gomlp.hpp"
#include "pplane/problem_io.hpp"
#include "pplane/render_svg.hpp"
#include "pplane/rng.hpp"
#include "pplane/synthetic.hpp"

using namespace pplane;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pplane_test_" + std::to_string(splitmix64(reinterpret_cast<std::uintptr_t>(this))));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Problem random_problem(std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<RawNet> raw(3);
  for (int i = 0; i < 3; ++i) {
    raw[static_cast<std::size_t>(i)].label = "net_" + std::to_string(i);
    const int q = 2 + static_cast<int>(rng.uniform_index(4));
    for (int p = 0; p < q; ++p) {
      raw[static_cast<std::size_t>(i)].pins.emplace_back(rng.uniform(0.5, 119.5),
                                                         rng.uniform(0.5, 79.5));
    }
  }
  return normalize_problem(raw, 120.0, 80.0, 48);
}

bool problems_equal(const Problem& a, const Problem& b) {
  if (a.board_width != b.board_width || a.board_height != b.board_height ||
      a.grid_resolution != b.grid_resolution || a.nets.size() != b.nets.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.nets.size(); ++i) {
    if (a.nets[i].id != b.nets[i].id || a.nets[i].label != b.nets[i].label ||
        a.nets[i].pins.size() != b.nets[i].pins.size()) {
      return false;
    }
    for (std::size_t p = 0; p < a.nets[i].pins.size(); ++p) {
      const Pin& pa = a.nets[i].pins[p];
      const Pin& pb = b.nets[i].pins[p];
      if (pa.x != pb.x || pa.y != pb.y || pa.raw_x != pb.raw_x || pa.raw_y != pb.raw_y) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("problem round-trips exactly through serialization") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Problem original = random_problem(seed);
    const Problem reparsed = problem_from_json(problem_to_json(original));
    CHECK(problems_equal(original, reparsed));
  }
}

TEST_CASE("malformed problem documents carry field context") {
  CHECK_THROWS_WITH_AS(problem_from_json(Json{{"nets", Json::array()}}),
                       doctest::Contains("board"), InputError);

  Json no_pins = Json{{"board", {{"width", 10.0}, {"height", 10.0}}},
                      {"nets", Json::array({Json{{"label", "A"}}})}};
  CHECK_THROWS_WITH_AS(problem_from_json(no_pins), doctest::Contains("pins"), InputError);

  Json bad_pin = Json{{"board", {{"width", 10.0}, {"height", 10.0}}},
                      {"nets", Json::array({Json{{"label", "A"},
                                                 {"pins", Json::array({Json::array({1.0})})}}})}};
  CHECK_THROWS_WITH_AS(problem_from_json(bad_pin), doctest::Contains("[x, y]"), InputError);
}

TEST_CASE("load_problem reports the file on parse errors") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_WITH_AS(load_problem(bad), doctest::Contains("bad.json"), InputError);
  CHECK_THROWS_AS(load_problem(tmp.path / "missing.json"), InputError);
}

TEST_CASE("grid serialization round-trips") {
  Grid grid(17, 1);
  RandomStream rng(3);
  for (auto& label : grid.labels) label = 1 + static_cast<int>(rng.uniform_index(4));
  const Grid back = grid_from_json(grid_to_json(grid));
  CHECK(back.resolution == grid.resolution);
  CHECK(back.labels == grid.labels);
}

TEST_CASE("result documents carry schema, config echo and masked timings") {
  const Problem p = random_problem(7);
  SolveOptions options;
  options.seed = 42;
  const GomlpResult result = solve_mlp_only(p, TrainConfig{}, options);
  const Json doc =
      gomlp_result_to_json(p, result, GaConfig{}, TrainConfig{}, options, true);
  CHECK(doc["schema"] == kSchemaVersion);
  CHECK(doc["kind"] == "mlp-result");
  CHECK(doc["config"]["seed"] == 42);
  CHECK(doc["config"]["train"]["learning_rate"] == 0.002);
  CHECK(doc["metrics"].contains("ei"));
  CHECK(doc["timings"].contains("wall_time_seconds"));

  const std::string masked = masked_document(doc);
  CHECK(masked.find("wall_time_seconds") == std::string::npos);

  // Masked form is identical across two runs with the same seed.
  const GomlpResult again = solve_mlp_only(p, TrainConfig{}, options);
  const Json doc2 =
      gomlp_result_to_json(p, again, GaConfig{}, TrainConfig{}, options, true);
  CHECK(masked == masked_document(doc2));
}

TEST_CASE("synthetic generation is deterministic and valid") {
  SyntheticSpec spec;
  spec.net_count = 6;
  spec.interleave_factor = 0.4;
  spec.rng_seed = 31;
  const auto problems = generate_problems(spec, 5);
  const auto again = generate_problems(spec, 5);
  REQUIRE(problems.size() == 5);
  for (std::size_t i = 0; i < problems.size(); ++i) {
    CHECK(problems_equal(problems[i], again[i]));
    CHECK(problems[i].net_count() == 6);
    for (const auto& net : problems[i].nets) {
      CHECK(net.pins.size() >= 3);
      CHECK(net.pins.size() <= 6);
    }
  }
}

TEST_CASE("interleave zero stays trivially separable for the plain MLP") {
  SyntheticSpec spec;
  spec.net_count = 4;
  spec.interleave_factor = 0.0;
  spec.rng_seed = 12;
  spec.grid_resolution = 60;
  const auto problems = generate_problems(spec, 3);
  for (const auto& problem : problems) {
    SolveOptions options;
    options.seed = 1;
    const GomlpResult result = solve_mlp_only(problem, TrainConfig{}, options);
    CHECK(result.feasible);
    CHECK(result.ei == 0);
  }
}

TEST_CASE("an impossible spread raises GenerationStuck") {
  SyntheticSpec spec;
  spec.net_count = 4;
  spec.cluster_spread = 1000.0;  // pins virtually never land inside the board
  CHECK_THROWS_AS(generate_problem(spec, 0), GenerationStuckError);
}

TEST_CASE("sign test matches the exact binomial") {
  CHECK(sign_test_p_value(8, 2) == doctest::Approx(0.109375).epsilon(1e-12));
  CHECK(sign_test_p_value(5, 5) == doctest::Approx(1.0));
  CHECK(sign_test_p_value(10, 0) == doctest::Approx(0.001953125).epsilon(1e-12));
  CHECK(sign_test_p_value(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("paired t-test matches the reference implementation") {
  double t = 0.0;
  // Frozen oracle values (scipy.stats.ttest_1samp against zero).
  CHECK(paired_t_test_p_value({1, 2, 3, 4, 5}, &t) ==
        doctest::Approx(0.013235599564).epsilon(1e-9));
  CHECK(t == doctest::Approx(4.242640687119).epsilon(1e-9));
  CHECK(paired_t_test_p_value({1, -1, 2, -2, 0.5}, &t) ==
        doctest::Approx(0.895405804487).epsilon(1e-9));
  // Degenerate inputs.
  CHECK(paired_t_test_p_value({1.0}) == 1.0);
  CHECK(paired_t_test_p_value({2.0, 2.0, 2.0}) == 0.0);
  CHECK(paired_t_test_p_value({0.0, 0.0, 0.0}) == 1.0);
}

TEST_CASE("incomplete beta spot values") {
  CHECK(incomplete_beta(2.0, 3.0, 0.3) == doctest::Approx(0.3483).epsilon(1e-10));
  CHECK(incomplete_beta(0.5, 4.0, 0.7) ==
        doctest::Approx(0.997455625383593).epsilon(1e-10));
  CHECK(incomplete_beta(1.0, 1.0, 0.0) == 0.0);
  CHECK(incomplete_beta(1.0, 1.0, 1.0) == 1.0);
}

TEST_CASE("benchmark aggregates are recomputable from rows") {
  BenchmarkReport report;
  auto add_row = [&](int g, int a, bool failed = false) {
    BenchmarkRow row;
    row.problem_id = "p" + std::to_string(report.rows.size());
    row.ei_gomlp = g;
    row.ei_astar = a;
    row.failed = failed;
    report.rows.push_back(row);
  };
  add_row(0, 0);
  add_row(0, 2);
  add_row(1, 3);
  add_row(2, 1);
  add_row(0, 0);
  add_row(9, 9, true);  // excluded
  aggregate_rows(report);
  CHECK(report.wins == 2);
  CHECK(report.ties == 2);
  CHECK(report.losses == 1);
  CHECK(report.failures == 1);
  CHECK(report.win_or_tie_rate == doctest::Approx(0.8));
  CHECK(report.sign_test_p == doctest::Approx(sign_test_p_value(2, 1)));
}

TEST_CASE("benchmark runs a tiny suite end to end") {
  SyntheticSpec spec;
  spec.net_count = 3;
  spec.interleave_factor = 0.0;
  spec.rng_seed = 2;
  spec.grid_resolution = 40;
  const auto problems = generate_problems(spec, 2);

  BenchmarkConfig config;
  config.ga.population_size = 6;
  config.ga.generations = 1;
  config.ga.elite_size = 2;
  config.per_problem_budget_seconds = 30.0;
  config.seed = 7;

  std::vector<std::pair<std::string, Problem>> named;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    named.emplace_back("p" + std::to_string(i), problems[i]);
  }
  const BenchmarkReport report = run_benchmark(named, config);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.failures == 0);
  CHECK(report.wins + report.ties + report.losses == 2);
  // Trivial problems: both solvers find EI 0, rows count as ties.
  for (const auto& row : report.rows) {
    CHECK(row.ei_gomlp == 0);
    CHECK(row.ei_astar == 0);
  }
  CHECK(report.win_or_tie_rate == doctest::Approx(1.0));

  // Rows sorted ascending by ei_gomlp, report JSON self-consistent.
  const Json doc = benchmark_report_to_json(report, config);
  CHECK(doc["aggregates"]["ties"] == 2);
  CHECK(doc["rows"].size() == 2);
}

TEST_CASE("partition SVG renders regions, pins and the island legend") {
  std::vector<RawNet> raw{{"A", {{2.0, 2.0}}}, {"B", {{8.0, 8.0}}}};
  const Problem p = normalize_problem(raw, 10.0, 10.0, 16);
  Grid grid(16, 1);
  for (int r = 8; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) grid.at(r, c) = 2;
  }
  const Partition partition = make_partition(grid, 2);
  const std::string svg = partition_svg(p, partition);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find(net_color(1, 2)) != std::string::npos);
  CHECK(svg.find(net_color(2, 2)) != std::string::npos);
  CHECK(svg.find("1 island") != std::string::npos);
  CHECK(svg.find(">A<") != std::string::npos);
  CHECK(svg.find(">B<") != std::string::npos);

  // Deterministic output.
  CHECK(svg == partition_svg(p, partition));

  // EI = 1 legend shows a split net.
  for (int c = 0; c < 16; ++c) grid.at(4, c) = 2;
  const Partition split = make_partition(grid, 2);
  const std::string svg2 = partition_svg(p, split);
  CHECK(svg2.find("2 islands") != std::string::npos);
}

TEST_CASE("single-net render is one filled rectangle plus markers") {
  std::vector<RawNet> raw{{"A", {{5.0, 5.0}}}};
  const Problem p = normalize_problem(raw, 10.0, 10.0, 16);
  const Partition partition = make_partition(Grid(16, 1), 1);
  const std::string svg = partition_svg(p, partition);
  // Full-board runs merge into one rect per row.
  CHECK(svg.find("<circle") != std::string::npos);
  std::size_t rects = 0;
  for (std::size_t pos = svg.find("<rect"); pos != std::string::npos;
       pos = svg.find("<rect", pos + 1)) {
    ++rects;
  }
  CHECK(rects == 16 + 2 + 1);  // 16 rows + background + legend panel + swatch
}

TEST_CASE("dendrogram SVG draws every merge") {
  Dendrogram dendro;
  dendro.leaves = {1, 2, 3};
  dendro.merges.push_back({0, 1, 0.2});
  dendro.merges.push_back({2, 3, 0.5});
  const std::string svg = dendrogram_svg(dendro, {"A", "B", "C"});
  std::size_t paths = 0;
  for (std::size_t pos = svg.find("<path"); pos != std::string::npos;
       pos = svg.find("<path", pos + 1)) {
    ++paths;
  }
  CHECK(paths == 2);
  CHECK(svg.find(">A<") != std::string::npos);
}
