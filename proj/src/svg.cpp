#include "chroma/svg.hpp"

#include <algorithm>
#include <cstdio>

#include "chroma/error.hpp"

namespace chroma::svg {

namespace {

constexpr int kMarginLeft = 46;
constexpr int kMarginRight = 12;
constexpr int kMarginTop = 28;
constexpr int kMarginBottom = 40;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, y0, plot_w, plot_h, y_min, y_max;
  double x(double frac) const { return x0 + frac * plot_w; }
  double y(double v) const {
    const double t = (v - y_min) / (y_max - y_min);
    return y0 + plot_h * (1.0 - t);
  }
};

std::string open_svg(const ChartOptions& o) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       std::to_string(o.width) + "\" height=\"" + std::to_string(o.height) +
       "\" viewBox=\"0 0 " + std::to_string(o.width) + " " +
       std::to_string(o.height) + "\">\n";
  if (!o.title.empty()) {
    s += "<text x=\"" + num(o.width / 2.0) +
         "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" + escape_text(o.title) + "</text>\n";
  }
  return s;
}

std::string axes(const Frame& f, const ChartOptions& o) {
  std::string s;
  const double x_end = f.x0 + f.plot_w;
  const double y_end = f.y0 + f.plot_h;
  s += "<line x1=\"" + num(f.x0) + "\" y1=\"" + num(f.y0) + "\" x2=\"" + num(f.x0) +
       "\" y2=\"" + num(y_end) + "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + num(f.x0) + "\" y1=\"" + num(y_end) + "\" x2=\"" + num(x_end) +
       "\" y2=\"" + num(y_end) + "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = f.y_min + (f.y_max - f.y_min) * i / 4.0;
    s += "<text x=\"" + num(f.x0 - 6) + "\" y=\"" + num(f.y(v) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
         num(v) + "</text>\n";
  }
  if (!o.y_label.empty()) {
    s += "<text x=\"12\" y=\"" + num(f.y0 + f.plot_h / 2.0) +
         "\" transform=\"rotate(-90 12 " + num(f.y0 + f.plot_h / 2.0) +
         ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         escape_text(o.y_label) + "</text>\n";
  }
  return s;
}

Frame make_frame(const ChartOptions& o) {
  return Frame{kMarginLeft, kMarginTop,
               static_cast<double>(o.width - kMarginLeft - kMarginRight),
               static_cast<double>(o.height - kMarginTop - kMarginBottom), o.y_min,
               o.y_max};
}

}  // namespace

std::string bar_chart(const std::vector<double>& values,
                      const std::vector<std::string>& fills,
                      const ChartOptions& options) {
  if (values.size() != fills.size()) {
    throw ValidationError("bar_chart: values/fills size mismatch");
  }
  const Frame f = make_frame(options);
  std::string s = open_svg(options) + axes(f, options);
  const std::size_t n = values.size();
  const double slot = f.plot_w / n;
  const double bar_w = std::max(1.0, slot * 0.8);
  const double base = f.y(std::max(options.y_min, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    const double top = f.y(v);
    const double y = std::min(top, base);
    const double h = std::max(0.5, std::abs(base - top));
    s += "<rect x=\"" + num(f.x0 + i * slot + (slot - bar_w) / 2.0) + "\" y=\"" +
         num(y) + "\" width=\"" + num(bar_w) + "\" height=\"" + num(h) +
         "\" fill=\"" + fills[i] + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string grouped_bar_chart(const std::vector<std::string>& group_labels,
                              const std::vector<std::vector<double>>& series,
                              const std::vector<std::string>& series_fills,
                              const std::vector<double>& baselines,
                              const ChartOptions& options) {
  if (series.empty()) throw ValidationError("grouped_bar_chart: no series");
  if (series.size() != series_fills.size()) {
    throw ValidationError("grouped_bar_chart: series/fills size mismatch");
  }
  const std::size_t n = group_labels.size();
  for (const auto& sv : series) {
    if (sv.size() != n) {
      throw ValidationError("grouped_bar_chart: series length mismatch");
    }
  }
  if (!baselines.empty() && baselines.size() != n) {
    throw ValidationError("grouped_bar_chart: baselines length mismatch");
  }

  const Frame f = make_frame(options);
  std::string s = open_svg(options) + axes(f, options);
  const double slot = f.plot_w / n;
  const double group_w = slot * 0.8;
  const double bar_w = group_w / series.size();
  const double base = f.y(std::max(options.y_min, 0.0));
  for (std::size_t g = 0; g < n; ++g) {
    const double gx = f.x0 + g * slot + (slot - group_w) / 2.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const double v = series[k][g];
      const double top = f.y(v);
      s += "<rect x=\"" + num(gx + k * bar_w) + "\" y=\"" + num(std::min(top, base)) +
           "\" width=\"" + num(bar_w) + "\" height=\"" +
           num(std::max(0.5, std::abs(base - top))) + "\" fill=\"" + series_fills[k] +
           "\"/>\n";
    }
    if (!baselines.empty()) {
      const double by = f.y(baselines[g]);
      s += "<line x1=\"" + num(gx) + "\" y1=\"" + num(by) + "\" x2=\"" +
           num(gx + group_w) + "\" y2=\"" + num(by) +
           "\" stroke=\"#008080\" stroke-width=\"2\"/>\n";
    }
    s += "<text x=\"" + num(gx + group_w / 2.0) + "\" y=\"" +
         num(f.y0 + f.plot_h + 12) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"8\" "
         "transform=\"rotate(-60 " + num(gx + group_w / 2.0) + " " +
         num(f.y0 + f.plot_h + 12) + ")\">" + escape_text(group_labels[g]) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string scatter(const std::vector<double>& xs, const std::vector<double>& ys,
                    const ChartOptions& options) {
  if (xs.size() != ys.size()) throw ValidationError("scatter: size mismatch");
  const Frame f = make_frame(options);
  double x_min = 0.0;
  double x_max = 1.0;
  if (!xs.empty()) {
    x_min = *std::min_element(xs.begin(), xs.end());
    x_max = *std::max_element(xs.begin(), xs.end());
    if (x_max == x_min) x_max = x_min + 1.0;
  }
  std::string s = open_svg(options) + axes(f, options);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fx = f.x0 + (xs[i] - x_min) / (x_max - x_min) * f.plot_w;
    s += "<circle cx=\"" + num(fx) + "\" cy=\"" + num(f.y(ys[i])) +
         "\" r=\"3\" fill=\"#336699\" fill-opacity=\"0.8\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace chroma::svg
