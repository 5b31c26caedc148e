#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pplane/errors.hpp"

namespace pplane {

/// A fixed I/O point of a net. Coordinates are normalized to the unit square;
/// the raw physical coordinates are retained so serialization round-trips
/// exactly.
struct Pin {
  double x = 0.0;
  double y = 0.0;
  double raw_x = 0.0;
  double raw_y = 0.0;
};

struct Net {
  int id = 0;  // 1-based, unique within a Problem
  std::string label;
  std::vector<Pin> pins;  // nonempty
};

/// The immutable input: board extents, grid resolution and the pin sets.
/// All solver math runs on normalized coordinates; the physical extents are
/// kept for rendering and serialization only.
struct Problem {
  std::vector<Net> nets;
  double board_width = 1.0;
  double board_height = 1.0;
  int grid_resolution = 100;  // cells per axis, >= 16

  int net_count() const { return static_cast<int>(nets.size()); }

  int total_pins() const {
    int q = 0;
    for (const auto& net : nets) q += static_cast<int>(net.pins.size());
    return q;
  }
};

/// Dense cell-center classification of the board, row-major net ids.
/// Row r covers y in [r/R, (r+1)/R), column c covers x likewise.
struct Grid {
  int resolution = 0;
  std::vector<int> labels;  // size resolution * resolution

  Grid() = default;
  Grid(int res, int fill_label)
      : resolution(res),
        labels(static_cast<std::size_t>(res) * static_cast<std::size_t>(res), fill_label) {}

  int at(int row, int col) const {
    return labels[static_cast<std::size_t>(row) * resolution + col];
  }
  int& at(int row, int col) {
    return labels[static_cast<std::size_t>(row) * resolution + col];
  }
  std::size_t cell_count() const { return labels.size(); }
};

/// One maximal 8-connected region of a net's plane.
struct Island {
  int net_id = 0;
  int resolution = 0;
  std::vector<std::pair<int, int>> cells;     // (row, col), nonempty
  std::vector<std::pair<int, int>> boundary;  // cells with an outside king-neighbor
  double centroid_x = 0.0;                    // mean of member cell centers
  double centroid_y = 0.0;
};

/// A label grid plus the per-net islands derived from it.
struct Partition {
  Grid grid;
  std::vector<std::vector<Island>> islands;  // islands[i] belongs to net id i+1

  int net_count() const { return static_cast<int>(islands.size()); }
};

/// Grid cell index for a normalized coordinate: floor(coord * R), with
/// coord = 1.0 clamped to the last cell so the mapping is total.
inline int cell_index(double coord, int resolution) {
  int idx = static_cast<int>(coord * resolution);
  if (idx < 0) idx = 0;
  if (idx >= resolution) idx = resolution - 1;
  return idx;
}

/// Normalized coordinate of a cell center along one axis.
inline double cell_center(int idx, int resolution) {
  return (idx + 0.5) / resolution;
}

struct RawNet {
  std::string label;
  std::vector<std::pair<double, double>> pins;  // physical coordinates
};

/// Affinely map physical pins into the unit square and validate the result.
/// Throws PinOutsideBoardError (with the offending net) when a pin lies
/// outside the extents and DuplicateCrossNetPinError when two pins of
/// different nets coincide exactly.
Problem normalize_problem(const std::vector<RawNet>& raw_nets, double board_width,
                          double board_height, int grid_resolution = 100);

struct FeasibilityReport {
  // misclassified[i] lists pin indices of net id i+1 whose covering cell
  // carries a different label.
  std::vector<std::vector<int>> misclassified;

  bool feasible() const {
    for (const auto& v : misclassified)
      if (!v.empty()) return false;
    return true;
  }
  int misclassified_count() const {
    int n = 0;
    for (const auto& v : misclassified) n += static_cast<int>(v.size());
    return n;
  }
};

/// A pin is feasible iff the label of the cell containing it equals its net id.
FeasibilityReport check_feasible(const Problem& problem, const Grid& grid);
FeasibilityReport check_feasible(const Problem& problem, const Partition& partition);

/// EI = sum_i s_i - m. Throws NetVanishedError if any net has no island.
int extra_islands(const Partition& partition, int net_count);

}  // namespace pplane
