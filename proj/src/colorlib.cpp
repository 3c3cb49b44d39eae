#include "chroma/colorlib.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "chroma/csv.hpp"
#include "chroma/error.hpp"

namespace chroma {

namespace {

// index, sorted_position, x, y, Y, L, a, b
constexpr const char* kUw71Csv = R"csv(1,50,0.17813,0.14021,18.419,50,28.891,-73.589
2,53,0.1742,0.082514,4.4155,25,53.857,-72.28
3,54,0.21726,0.13588,18.419,50,53.857,-72.28
4,55,0.2591,0.13088,18.419,50,78.822,-70.972
5,46,0.18715,0.19157,18.419,50,2.6168,-49.931
6,51,0.19063,0.1298,4.4155,25,27.583,-48.623
7,52,0.23145,0.18448,18.419,50,27.583,-48.623
8,57,0.25495,0.12284,4.4155,25,52.548,-47.315
9,56,0.27872,0.17635,18.419,50,52.548,-47.315
10,61,0.32783,0.1674,18.419,50,77.514,-46.006
11,45,0.22397,0.28399,48.278,75,-23.657,-26.274
12,47,0.2081,0.21415,4.4155,25,1.3084,-24.966
13,48,0.24471,0.25395,18.419,50,1.3084,-24.966
14,49,0.26261,0.27354,48.278,75,1.3084,-24.966
15,58,0.28644,0.19884,4.4155,25,26.274,-23.657
16,59,0.29797,0.24051,18.419,50,26.274,-23.657
17,60,0.30272,0.2622,48.278,75,26.274,-23.657
18,62,0.36941,0.18108,4.4155,25,51.24,-22.349
19,63,0.35288,0.2259,18.419,50,51.24,-22.349
20,64,0.40795,0.21059,18.419,50,76.206,-21.041
21,44,0.23784,0.35662,72.065,88,-49.931,-2.6168
22,43,0.25332,0.35108,18.419,50,-24.966,-1.3084
23,42,0.26938,0.34523,48.278,75,-24.966,-1.3084
24,41,0.27473,0.34327,72.065,88,-24.966,-1.3084
25,6,0.313,0.3290,0,0,0,0
26,5,0.31273,0.32902,4.4155,25,0,0
27,4,0.31273,0.32902,18.419,50,0,0
28,3,0.31273,0.32902,48.278,75,0,0
29,1,0.31273,0.32902,100.00,100,0,0
30,2,0.31273,0.32902,72.065,88,0,0
31,67,0.41044,0.2905,4.4155,25,24.966,1.3084
32,68,0.37353,0.30534,18.419,50,24.966,1.3084
33,69,0.3568,0.31196,48.278,75,24.966,1.3084
34,66,0.43376,0.28095,18.419,50,49.931,2.6168
35,65,0.49181,0.25666,18.419,50,74.897,3.9252
36,40,0.27022,0.43268,48.278,75,-51.24,22.349
37,39,0.27623,0.41829,72.065,88,-51.24,22.349
38,36,0.3075,0.52435,4.4155,25,-26.274,23.657
39,33,0.31561,0.44408,18.419,50,-26.274,23.657
40,32,0.31654,0.41004,48.278,75,-26.274,23.657
41,31,0.31652,0.39917,72.065,88,-26.274,23.657
42,20,0.41791,0.4496,4.4155,25,-1.3084,24.966
43,17,0.38179,0.40728,18.419,50,-1.3084,24.966
44,16,0.36355,0.38634,48.278,75,-1.3084,24.966
45,15,0.35735,0.37928,72.065,88,-1.3084,24.966
46,10,0.52174,0.37656,4.4155,25,23.657,26.274
47,9,0.44682,0.36993,18.419,50,23.657,26.274
48,8,0.41032,0.36214,48.278,75,23.657,26.274
49,7,0.50873,0.33341,18.419,50,48.623,27.583
50,70,0.56618,0.29873,18.419,50,73.589,28.891
51,38,0.29736,0.57731,18.419,50,-52.548,47.315
52,35,0.31049,0.50294,48.278,75,-52.548,47.315
53,34,0.31313,0.47888,72.065,88,-52.548,47.315
54,28,0.36753,0.52508,18.419,50,-27.583,48.623
55,27,0.35998,0.47135,48.278,75,-27.583,48.623
56,26,0.35593,0.45307,72.065,88,-27.583,48.623
57,22,0.43671,0.47238,18.419,50,-2.6168,49.931
58,19,0.4092,0.43925,48.278,75,-2.6168,49.931
59,18,0.39861,0.42682,72.065,88,-2.6168,49.931
60,13,0.50246,0.42134,18.419,50,22.349,51.24
61,12,0.4572,0.40735,48.278,75,22.349,51.24
62,11,0.56315,0.37345,18.419,50,47.315,52.548
63,71,0.61793,0.32963,18.419,50,72.28,53.857
64,37,0.30023,0.56426,72.065,88,-78.822,70.972
65,29,0.34264,0.56147,48.278,75,-53.857,72.28
66,30,0.34455,0.53221,72.065,88,-53.857,72.28
67,24,0.39381,0.52123,48.278,75,-28.891,73.589
68,25,0.38886,0.49964,72.065,88,-28.891,73.589
69,23,0.44388,0.48131,48.278,75,-3.9252,74.897
70,21,0.43244,0.46714,72.065,88,-3.9252,74.897
71,14,0.49196,0.4425,48.278,75,21.041,76.206
)csv";

constexpr std::uint64_t kUw71Checksum = 0x49d4d0969388a67aULL;

std::uint64_t fnv1a(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *s; ++s) {
    h ^= static_cast<unsigned char>(*s);
    h *= 0x100000001b3ULL;
  }
  return h;
}

ColorSpec make_spec(int index, int sorted_position, const XyYColor& xyy,
                    const LabColor& lab, const WhitePoint& w) {
  ColorSpec spec;
  spec.index = index;
  spec.sorted_position = sorted_position;
  spec.xyy = xyy;
  spec.lab = lab;
  spec.lch = lab_to_lch(lab);
  const HexColor hex = lab_to_hex(lab, w);
  spec.hex = hex.hex;
  spec.clamped = hex.clamped;
  return spec;
}

}  // namespace

ColorLibrary load_uw71() {
  if (fnv1a(kUw71Csv) != kUw71Checksum) {
    throw ConfigError("embedded UW-71 color data failed its checksum");
  }
  ColorLibrary lib;
  lib.name = "UW-71";
  lib.white_point = d65();
  const std::string text = kUw71Csv;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    const XyYColor xyy{csv::parse_double(f[2]), csv::parse_double(f[3]),
                       csv::parse_double(f[4])};
    const LabColor lab{csv::parse_double(f[5]), csv::parse_double(f[6]),
                       csv::parse_double(f[7])};
    lib.colors.push_back(make_spec(std::stoi(f[0]), std::stoi(f[1]), xyy, lab,
                                   lib.white_point));
  }
  return lib;
}

ColorLibrary generate_grid_library(
    double delta_e, const std::vector<double>& lightness_planes,
    const std::function<bool(const LabColor&)>& gamut_filter, double ab_limit,
    const WhitePoint& w) {
  if (delta_e <= 0.0) throw ValidationError("delta_e must be positive");
  ColorLibrary lib;
  char name[48];
  std::snprintf(name, sizeof(name), "grid-dE%g", delta_e);
  lib.name = name;
  lib.white_point = w;

  std::vector<double> planes = lightness_planes;
  std::sort(planes.begin(), planes.end());

  const int steps = static_cast<int>(std::floor(ab_limit / delta_e + 1e-9));
  std::vector<LabColor> kept;
  for (double L : planes) {
    for (int i = -steps; i <= steps; ++i) {
      for (int j = -steps; j <= steps; ++j) {
        const LabColor lab{L, i * delta_e, j * delta_e};
        if (gamut_filter(lab)) kept.push_back(lab);
      }
    }
  }
  if (kept.empty()) {
    throw EmptyLibraryError("grid library is empty: filter rejected every lattice point");
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    lib.colors.push_back(make_spec(static_cast<int>(i) + 1, 0, xyz_to_xyy(lab_to_xyz(kept[i], w)),
                                   kept[i], w));
  }
  const std::vector<int> ranks = sort_by_hue_chroma(lib);
  for (std::size_t i = 0; i < lib.colors.size(); ++i) {
    lib.colors[i].sorted_position = ranks[i];
  }
  return lib;
}

std::vector<int> sort_by_hue_chroma(const ColorLibrary& lib) {
  const std::size_t n = lib.colors.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t ia, std::size_t ib) {
    const LchColor& a = lib.colors[ia].lch;
    const LchColor& b = lib.colors[ib].lch;
    const bool achro_a = a.C == 0.0;
    const bool achro_b = b.C == 0.0;
    if (achro_a != achro_b) return achro_a;
    if (achro_a) return a.L > b.L;
    if (a.h != b.h) return a.h < b.h;
    if (a.C != b.C) return a.C < b.C;
    return a.L > b.L;
  });
  std::vector<int> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<int>(r) + 1;
  return rank;
}

void write_library_csv(const ColorLibrary& lib, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write library CSV: " + path);
  out << "index,sorted_position,x,y,Y,L,a,b,C,h,hex,clamped\n";
  for (const ColorSpec& c : lib.colors) {
    out << c.index << ',' << c.sorted_position << ',' << csv::format_double(c.xyy.x)
        << ',' << csv::format_double(c.xyy.y) << ',' << csv::format_double(c.xyy.Y)
        << ',' << csv::format_double(c.lab.L) << ',' << csv::format_double(c.lab.a)
        << ',' << csv::format_double(c.lab.b) << ',' << csv::format_double(c.lch.C)
        << ',' << csv::format_double(c.lch.h) << ',' << c.hex << ','
        << (c.clamped ? "true" : "false") << '\n';
  }
}

ColorLibrary read_library_csv(const std::string& path, const std::string& name) {
  const csv::Table t = csv::read_file(path);
  const std::vector<std::string> expected = {"index", "sorted_position", "x", "y",
                                             "Y",     "L",               "a", "b",
                                             "C",     "h",               "hex", "clamped"};
  if (t.header != expected) {
    throw SchemaError("library CSV header mismatch in " + path);
  }
  ColorLibrary lib;
  lib.name = name.empty() ? path : name;
  lib.white_point = d65();
  for (const auto& row : t.rows) {
    if (row.size() != expected.size()) {
      throw SchemaError("library CSV row arity mismatch in " + path);
    }
    ColorSpec c;
    c.index = std::stoi(row[0]);
    c.sorted_position = std::stoi(row[1]);
    c.xyy = XyYColor{csv::parse_double(row[2]), csv::parse_double(row[3]),
                     csv::parse_double(row[4])};
    c.lab = LabColor{csv::parse_double(row[5]), csv::parse_double(row[6]),
                     csv::parse_double(row[7])};
    c.lch = LchColor{c.lab.L, csv::parse_double(row[8]), csv::parse_double(row[9])};
    c.hex = row[10];
    c.clamped = row[11] == "true";
    if (!is_well_formed_hex(c.hex)) {
      throw SchemaError("library CSV has malformed hex '" + c.hex + "' in " + path);
    }
    lib.colors.push_back(c);
  }
  if (lib.colors.empty()) throw EmptyLibraryError("library CSV has no rows: " + path);
  return lib;
}

}  // namespace chroma
