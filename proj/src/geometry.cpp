#include "pplane/geometry.hpp"

#include <map>
#include <sstream>

namespace pplane {

Problem normalize_problem(const std::vector<RawNet>& raw_nets, double board_width,
                          double board_height, int grid_resolution) {
  if (!(board_width > 0.0) || !(board_height > 0.0)) {
    throw InputError("board extents must be strictly positive");
  }
  if (raw_nets.empty()) {
    throw InputError("a problem needs at least one net");
  }
  if (grid_resolution < 16) {
    throw InputError("grid_resolution must be at least 16, got " +
                     std::to_string(grid_resolution));
  }

  Problem problem;
  problem.board_width = board_width;
  problem.board_height = board_height;
  problem.grid_resolution = grid_resolution;
  problem.nets.reserve(raw_nets.size());

  // Exact-coordinate ownership map for cross-net duplicate detection.
  std::map<std::pair<double, double>, int> owner;

  int id = 1;
  for (const auto& raw : raw_nets) {
    if (raw.pins.empty()) {
      throw InputError("net '" + raw.label + "' has no pins");
    }
    Net net;
    net.id = id;
    net.label = raw.label.empty() ? ("N" + std::to_string(id)) : raw.label;
    net.pins.reserve(raw.pins.size());
    for (const auto& [px, py] : raw.pins) {
      if (px < 0.0 || px > board_width || py < 0.0 || py > board_height) {
        std::ostringstream msg;
        msg << "pin (" << px << ", " << py << ") of net '" << net.label
            << "' (id " << id << ") lies outside the " << board_width << " x "
            << board_height << " board";
        throw PinOutsideBoardError(msg.str());
      }
      auto [it, inserted] = owner.emplace(std::make_pair(px, py), id);
      if (!inserted && it->second != id) {
        std::ostringstream msg;
        msg << "pin (" << px << ", " << py << ") appears in both net id "
            << it->second << " and net id " << id;
        throw DuplicateCrossNetPinError(msg.str());
      }
      Pin pin;
      pin.raw_x = px;
      pin.raw_y = py;
      pin.x = px / board_width;
      pin.y = py / board_height;
      net.pins.push_back(pin);
    }
    problem.nets.push_back(std::move(net));
    ++id;
  }
  return problem;
}

FeasibilityReport check_feasible(const Problem& problem, const Grid& grid) {
  if (grid.resolution != problem.grid_resolution) {
    throw InputError("partition resolution " + std::to_string(grid.resolution) +
                     " does not match problem grid_resolution " +
                     std::to_string(problem.grid_resolution));
  }
  FeasibilityReport report;
  report.misclassified.resize(problem.nets.size());
  for (std::size_t i = 0; i < problem.nets.size(); ++i) {
    const Net& net = problem.nets[i];
    for (std::size_t p = 0; p < net.pins.size(); ++p) {
      const Pin& pin = net.pins[p];
      const int row = cell_index(pin.y, grid.resolution);
      const int col = cell_index(pin.x, grid.resolution);
      if (grid.at(row, col) != net.id) {
        report.misclassified[i].push_back(static_cast<int>(p));
      }
    }
  }
  return report;
}

FeasibilityReport check_feasible(const Problem& problem, const Partition& partition) {
  return check_feasible(problem, partition.grid);
}

int extra_islands(const Partition& partition, int net_count) {
  if (static_cast<int>(partition.islands.size()) < net_count) {
    throw InputError("partition has island lists for " +
                     std::to_string(partition.islands.size()) + " nets, expected " +
                     std::to_string(net_count));
  }
  int total = 0;
  for (int i = 0; i < net_count; ++i) {
    const auto s_i = partition.islands[i].size();
    if (s_i == 0) {
      throw NetVanishedError("net id " + std::to_string(i + 1) +
                             " owns no cells; extra-islands is undefined");
    }
    total += static_cast<int>(s_i);
  }
  return total - net_count;
}

}  // namespace pplane
