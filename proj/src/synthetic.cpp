#include "pplane/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pplane/rng.hpp"

namespace pplane {

namespace {

constexpr double kMargin = 0.08;        // keep cluster centers off the rim
constexpr double kPinMargin = 0.02;     // pins stay strictly inside the board
constexpr int kProblemRetries = 60;
constexpr int kCenterRetries = 240;
constexpr int kPinRetries = 120;

struct Cluster {
  double x, y;
  int pins;
};

double center_separation(int net_count) {
  // Looser for a handful of nets, tighter as the board fills up.
  return std::min(0.26, 0.85 / std::sqrt(static_cast<double>(net_count)));
}

bool far_from_all(double x, double y, const std::vector<std::pair<double, double>>& centers,
                  double min_sep, int skip = -1) {
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (static_cast<int>(i) == skip) continue;
    const double dx = x - centers[i].first;
    const double dy = y - centers[i].second;
    if (dx * dx + dy * dy < min_sep * min_sep) return false;
  }
  return true;
}

}  // namespace

Problem generate_problem(const SyntheticSpec& spec, int index) {
  if (spec.net_count < 2 || spec.net_count > 20) {
    throw InputError("net_count must be in 2..20, got " + std::to_string(spec.net_count));
  }
  if (spec.pins_per_net_min < 1 || spec.pins_per_net_max < spec.pins_per_net_min) {
    throw InputError("invalid pins_per_net range");
  }
  if (spec.interleave_factor < 0.0 || spec.interleave_factor > 1.0) {
    throw InputError("interleave_factor must be in [0, 1]");
  }

  const int m = spec.net_count;
  const double min_sep = center_separation(m);

  for (int attempt = 0; attempt < kProblemRetries; ++attempt) {
    RandomStream rng(derive_seed(spec.rng_seed, 0x5e17, index, attempt));

    // Base cluster per net, mutually separated.
    std::vector<std::pair<double, double>> centers;
    bool placed_all = true;
    for (int i = 0; i < m && placed_all; ++i) {
      bool placed = false;
      for (int t = 0; t < kCenterRetries; ++t) {
        const double x = rng.uniform(kMargin, 1.0 - kMargin);
        const double y = rng.uniform(kMargin, 1.0 - kMargin);
        // Gradually relax separation so dense boards still resolve.
        const double sep = min_sep * (1.0 - 0.5 * t / kCenterRetries);
        if (far_from_all(x, y, centers, sep)) {
          centers.emplace_back(x, y);
          placed = true;
          break;
        }
      }
      placed_all = placed;
    }
    if (!placed_all) continue;

    // Split nets: two clusters flanking a rival net's center.
    std::vector<std::vector<Cluster>> clusters(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const int q = rng.uniform_int(spec.pins_per_net_min, spec.pins_per_net_max);
      const bool split = m >= 2 && q >= 2 && rng.bernoulli(spec.interleave_factor);
      if (!split) {
        clusters[static_cast<std::size_t>(i)].push_back({centers[static_cast<std::size_t>(i)].first,
                                                         centers[static_cast<std::size_t>(i)].second, q});
        continue;
      }
      bool flanked = false;
      for (int t = 0; t < kCenterRetries && !flanked; ++t) {
        int victim = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m)));
        if (victim == i) victim = (victim + 1) % m;
        const double angle = rng.uniform(0.0, 6.283185307179586);
        const double reach = rng.uniform(0.55, 0.95) * min_sep + 0.5 * min_sep;
        const double ux = std::cos(angle) * reach;
        const double uy = std::sin(angle) * reach;
        const double ax = centers[static_cast<std::size_t>(victim)].first + ux;
        const double ay = centers[static_cast<std::size_t>(victim)].second + uy;
        const double bx = centers[static_cast<std::size_t>(victim)].first - ux;
        const double by = centers[static_cast<std::size_t>(victim)].second - uy;
        const bool inside = ax > kMargin && ax < 1.0 - kMargin && ay > kMargin &&
                            ay < 1.0 - kMargin && bx > kMargin && bx < 1.0 - kMargin &&
                            by > kMargin && by < 1.0 - kMargin;
        if (!inside) continue;
        if (!far_from_all(ax, ay, centers, 0.55 * min_sep, victim) ||
            !far_from_all(bx, by, centers, 0.55 * min_sep, victim)) {
          continue;
        }
        const int first_half = q / 2 + (q % 2);
        clusters[static_cast<std::size_t>(i)].push_back({ax, ay, first_half});
        clusters[static_cast<std::size_t>(i)].push_back({bx, by, q - first_half});
        flanked = true;
      }
      if (!flanked) {
        clusters[static_cast<std::size_t>(i)].push_back({centers[static_cast<std::size_t>(i)].first,
                                                         centers[static_cast<std::size_t>(i)].second, q});
      }
    }

    // Scatter pins around their clusters, in physical units.
    std::vector<RawNet> raw(static_cast<std::size_t>(m));
    bool pins_ok = true;
    for (int i = 0; i < m && pins_ok; ++i) {
      raw[static_cast<std::size_t>(i)].label = "N" + std::to_string(i + 1);
      for (const Cluster& cl : clusters[static_cast<std::size_t>(i)]) {
        for (int p = 0; p < cl.pins && pins_ok; ++p) {
          bool placed = false;
          for (int t = 0; t < kPinRetries; ++t) {
            const double x = cl.x + rng.gaussian() * spec.cluster_spread;
            const double y = cl.y + rng.gaussian() * spec.cluster_spread;
            if (x < kPinMargin || x > 1.0 - kPinMargin || y < kPinMargin ||
                y > 1.0 - kPinMargin) {
              continue;
            }
            raw[static_cast<std::size_t>(i)].pins.emplace_back(x * spec.board_size,
                                                               y * spec.board_size);
            placed = true;
            break;
          }
          if (!placed) pins_ok = false;  // re-roll the whole problem
        }
      }
    }
    if (!pins_ok) continue;

    try {
      return normalize_problem(raw, spec.board_size, spec.board_size,
                               spec.grid_resolution);
    } catch (const InputError&) {
      continue;  // duplicate coordinates are astronomically rare; just re-roll
    }
  }
  throw GenerationStuckError("rejection sampling failed after " +
                             std::to_string(kProblemRetries) +
                             " attempts; the spec (spread " +
                             std::to_string(spec.cluster_spread) + ", " +
                             std::to_string(spec.net_count) +
                             " nets) does not fit the board");
}

std::vector<Problem> generate_problems(const SyntheticSpec& spec, int count) {
  std::vector<Problem> problems;
  problems.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) problems.push_back(generate_problem(spec, i));
  return problems;
}

}  // namespace pplane
