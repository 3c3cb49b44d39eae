#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chroma/colorspace.hpp"

namespace chroma {

// One library color with every coordinate representation attached.
struct ColorSpec {
  int index = 0;            // 1-based position in the library
  int sorted_position = 0;  // 1-based rank under the hue/chroma ordering
  XyYColor xyy;
  LabColor lab;
  LchColor lch;
  std::string hex;
  bool clamped = false;
};

struct ColorLibrary {
  std::string name;
  std::vector<ColorSpec> colors;
  WhitePoint white_point;

  std::size_t size() const { return colors.size(); }
  const ColorSpec& at(int index_1based) const { return colors.at(index_1based - 1); }
};

// The built-in 71-color library: a dE=25 CIELAB grid plus 13 high-lightness
// supplements, shipped as canonical embedded data. Throws ConfigError if the
// embedded block fails its checksum.
ColorLibrary load_uw71();

// Axis-aligned CIELAB lattice with spacing `delta_e` on the given lightness
// planes, keeping points with |a|,|b| <= ab_limit that pass `gamut_filter`.
// Colors are ordered by (L, a, b); throws EmptyLibraryError when nothing
// survives the filter.
ColorLibrary generate_grid_library(
    double delta_e, const std::vector<double>& lightness_planes,
    const std::function<bool(const LabColor&)>& gamut_filter,
    double ab_limit = 100.0, const WhitePoint& w = d65());

// Rank of each color (1-based, aligned with lib.colors) when sorted by hue
// angle then chroma. Achromatic colors (C = 0) come first, ordered by
// descending lightness; chromatic ties break toward lower chroma, then
// higher lightness, then original order.
std::vector<int> sort_by_hue_chroma(const ColorLibrary& lib);

// CSV round trip. Columns: index, sorted_position, x, y, Y, L, a, b, C, h,
// hex, clamped. Header row mandatory.
void write_library_csv(const ColorLibrary& lib, const std::string& path);
ColorLibrary read_library_csv(const std::string& path, const std::string& name = "");

}  // namespace chroma
