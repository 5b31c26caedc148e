#include "pplane/render_svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pplane {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string hsv_to_hex(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = v - c;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>((r + m) * 255.0 + 0.5),
                static_cast<int>((g + m) * 255.0 + 0.5),
                static_cast<int>((b + m) * 255.0 + 0.5));
  return buf;
}

}  // namespace

std::string net_color(int net_id, int net_count) {
  const int m = std::max(net_count, 1);
  // Spread hues; alternate saturation a little so neighbors stay distinct.
  const double hue = std::fmod(360.0 * (net_id - 1) / m, 360.0);
  const double sat = (net_id % 2 == 0) ? 0.55 : 0.72;
  return hsv_to_hex(hue, sat, 0.88);
}

std::string partition_svg(const Problem& problem, const Partition& partition,
                          const RenderOptions& options) {
  const int res = partition.grid.resolution;
  const double side = options.canvas_px;
  const double cell = side / res;
  const double legend_w = 190.0;
  const int m = problem.net_count();

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(side + legend_w)
      << "\" height=\"" << fmt(side) << "\" viewBox=\"0 0 " << fmt(side + legend_w) << ' '
      << fmt(side) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << fmt(side) << "\" height=\"" << fmt(side)
      << "\" fill=\"#ffffff\"/>\n";

  // Board rows as run-length merged rectangles; y flips so row 0 is at the
  // bottom, matching board coordinates.
  for (int r = 0; r < res; ++r) {
    int c = 0;
    while (c < res) {
      const int label = partition.grid.at(r, c);
      int end = c + 1;
      while (end < res && partition.grid.at(r, end) == label) ++end;
      if (label >= 1) {
        svg << "<rect x=\"" << fmt(c * cell) << "\" y=\"" << fmt(side - (r + 1) * cell)
            << "\" width=\"" << fmt((end - c) * cell) << "\" height=\"" << fmt(cell)
            << "\" fill=\"" << net_color(label, m) << "\"/>\n";
      }
      c = end;
    }
  }

  // Handle overlay under the pins so pins stay readable.
  if (options.show_handles && options.handles_per_net > 0) {
    const int k = options.handles_per_net;
    for (int net = 0; net < m; ++net) {
      for (int h = 0; h < k; ++h) {
        const std::size_t base = static_cast<std::size_t>(2 * k) * net + 2 * h;
        if (base + 1 >= options.handles.size()) break;
        const double x = options.handles[base] * side;
        const double y = side - options.handles[base + 1] * side;
        svg << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
            << "\" r=\"4\" fill=\"none\" stroke=\"" << net_color(net + 1, m)
            << "\" stroke-width=\"1.5\"/>\n";
      }
    }
  }

  for (const auto& net : problem.nets) {
    for (const auto& pin : net.pins) {
      const double x = pin.x * side;
      const double y = side - pin.y * side;
      svg << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
          << "\" r=\"3.2\" fill=\"#111111\"/>\n";
      svg << "<text x=\"" << fmt(x + 4.5) << "\" y=\"" << fmt(y - 3.5)
          << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"#111111\">"
          << net.label << "</text>\n";
    }
  }

  svg << "<rect x=\"" << fmt(side) << "\" y=\"0\" width=\"" << fmt(legend_w)
      << "\" height=\"" << fmt(side) << "\" fill=\"#f7f7f7\"/>\n";
  double ly = 22.0;
  svg << "<text x=\"" << fmt(side + 12) << "\" y=\"" << fmt(ly)
      << "\" font-size=\"13\" font-family=\"sans-serif\" font-weight=\"bold\">"
      << "nets / islands</text>\n";
  ly += 20.0;
  for (int net = 0; net < m; ++net) {
    const std::size_t count =
        net < static_cast<int>(partition.islands.size()) ? partition.islands[net].size() : 0;
    svg << "<rect x=\"" << fmt(side + 12) << "\" y=\"" << fmt(ly - 10)
        << "\" width=\"13\" height=\"13\" fill=\"" << net_color(net + 1, m) << "\"/>\n";
    svg << "<text x=\"" << fmt(side + 32) << "\" y=\"" << fmt(ly + 1)
        << "\" font-size=\"12\" font-family=\"sans-serif\">"
        << problem.nets[static_cast<std::size_t>(net)].label << ": " << count
        << (count == 1 ? " island" : " islands") << "</text>\n";
    ly += 19.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

void render_partition(const Problem& problem, const Partition& partition,
                      const std::filesystem::path& out_path, const RenderOptions& options) {
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write SVG to " + out_path.string());
  out << partition_svg(problem, partition, options);
}

std::string dendrogram_svg(const Dendrogram& dendrogram,
                           const std::vector<std::string>& leaf_labels) {
  const int m = dendrogram.leaf_count();
  const double width = std::max(320.0, 46.0 * m + 80.0);
  const double height = 420.0;
  const double plot_left = 50.0, plot_right = width - 20.0;
  const double plot_top = 26.0, plot_bottom = height - 46.0;

  double max_height = 0.0;
  for (const auto& merge : dendrogram.merges) max_height = std::max(max_height, merge.height);
  if (max_height <= 0.0) max_height = 1.0;

  auto y_of = [&](double h) {
    return plot_bottom - (h / max_height) * (plot_bottom - plot_top);
  };

  // x position and current top height per cluster id.
  std::vector<double> x(static_cast<std::size_t>(2 * m - 1), 0.0);
  std::vector<double> top(static_cast<std::size_t>(2 * m - 1), 0.0);
  const double step = (plot_right - plot_left) / std::max(1, m - 1);
  for (int leaf = 0; leaf < m; ++leaf) {
    x[static_cast<std::size_t>(leaf)] = plot_left + step * leaf;
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' '
      << fmt(height) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" fill=\"#ffffff\"/>\n";

  for (std::size_t t = 0; t < dendrogram.merges.size(); ++t) {
    const auto& merge = dendrogram.merges[t];
    const double xa = x[static_cast<std::size_t>(merge.a)];
    const double xb = x[static_cast<std::size_t>(merge.b)];
    const double ya = y_of(top[static_cast<std::size_t>(merge.a)]);
    const double yb = y_of(top[static_cast<std::size_t>(merge.b)]);
    const double ym = y_of(merge.height);
    svg << "<path d=\"M " << fmt(xa) << ' ' << fmt(ya) << " L " << fmt(xa) << ' ' << fmt(ym)
        << " L " << fmt(xb) << ' ' << fmt(ym) << " L " << fmt(xb) << ' ' << fmt(yb)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.4\"/>\n";
    const std::size_t merged = static_cast<std::size_t>(m) + t;
    x[merged] = 0.5 * (xa + xb);
    top[merged] = merge.height;
  }

  for (int leaf = 0; leaf < m; ++leaf) {
    const std::string label =
        leaf < static_cast<int>(leaf_labels.size()) ? leaf_labels[static_cast<std::size_t>(leaf)]
                                                    : std::to_string(dendrogram.leaves[static_cast<std::size_t>(leaf)]);
    svg << "<text x=\"" << fmt(x[static_cast<std::size_t>(leaf)]) << "\" y=\""
        << fmt(plot_bottom + 18.0)
        << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">" << label
        << "</text>\n";
  }
  svg << "<text x=\"14\" y=\"" << fmt(plot_top)
      << "\" font-size=\"11\" font-family=\"sans-serif\">1/d</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void render_dendrogram(const Dendrogram& dendrogram,
                       const std::vector<std::string>& leaf_labels,
                       const std::filesystem::path& out_path) {
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write SVG to " + out_path.string());
  out << dendrogram_svg(dendrogram, leaf_labels);
}

}  // namespace pplane
