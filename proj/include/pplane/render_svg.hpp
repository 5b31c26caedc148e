#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pplane/genopt.hpp"
#include "pplane/geometry.hpp"
#include "pplane/multilayer.hpp"

namespace pplane {

struct RenderOptions {
  double canvas_px = 640.0;      // board drawing area, excluding the legend
  bool show_handles = false;     // overlay handle markers from a chromosome
  Chromosome handles;            // 2*k*m layout, block per net
  int handles_per_net = 0;
};

/// Deterministic color for a net id (1-based) among m nets.
std::string net_color(int net_id, int net_count);

/// One filled region per net (row-run rectangles), pins as labeled markers,
/// optional handle overlay, and a legend with per-net island counts.
std::string partition_svg(const Problem& problem, const Partition& partition,
                          const RenderOptions& options = {});

void render_partition(const Problem& problem, const Partition& partition,
                      const std::filesystem::path& out_path,
                      const RenderOptions& options = {});

/// Merge-tree rendering with leaf labels at the bottom and merge heights on
/// the vertical axis.
std::string dendrogram_svg(const Dendrogram& dendrogram,
                           const std::vector<std::string>& leaf_labels);

void render_dendrogram(const Dendrogram& dendrogram,
                       const std::vector<std::string>& leaf_labels,
                       const std::filesystem::path& out_path);

}  // namespace pplane
