#pragma once

#include <string>
#include <vector>

namespace chroma::svg {

struct ChartOptions {
  int width = 960;
  int height = 320;
  double y_min = 0.0;
  double y_max = 1.0;
  std::string title;
  std::string y_label;
};

// One <rect> per value; fills[i] is the bar's fill attribute. Axes are drawn
// with <line> elements so the rect count equals the value count exactly.
std::string bar_chart(const std::vector<double>& values,
                      const std::vector<std::string>& fills,
                      const ChartOptions& options);

// Bars for one or more series side by side per group, with an optional
// per-group horizontal baseline tick.
std::string grouped_bar_chart(const std::vector<std::string>& group_labels,
                              const std::vector<std::vector<double>>& series,
                              const std::vector<std::string>& series_fills,
                              const std::vector<double>& baselines,
                              const ChartOptions& options);

std::string scatter(const std::vector<double>& xs, const std::vector<double>& ys,
                    const ChartOptions& options);

}  // namespace chroma::svg
