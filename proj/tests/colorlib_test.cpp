#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <set>

#include "chroma/colorlib.hpp"
#include "chroma/error.hpp"
#include "test_util.hpp"

using namespace chroma;

namespace {

// Frozen from an independent reference conversion of the embedded Lab values.
constexpr std::array<const char*, 71> kExpectedHex = {
    "#2F6EF6", "#3518AD", "#8558F4", "#B62EF2", "#077ACC", "#2E3086", "#746BCA",
    "#600B84", "#A553C8", "#CD26C7", "#4DC7E8", "#1C3D61", "#5E78A1", "#A0BAE6",
    "#512D5F", "#90689F", "#D5A9E4", "#72005E", "#B8509E", "#DB1F9D", "#39F6E0",
    "#3B8378", "#7EC6BA", "#A2EADE", "#000000", "#3B3B3B", "#777777", "#B9B9B9",
    "#FFFFFF", "#DDDDDD", "#5E2B3A", "#A06776", "#E6A8B7", "#C34F74", "#E31B73",
    "#4BCF8E", "#73F5B0", "#184415", "#55824D", "#96C58C", "#BAEAAF", "#443B14",
    "#83764C", "#C7B88B", "#EDDCAD", "#632B14", "#A8664B", "#F1A78A", "#C94E4B",
    "#E81A4B", "#0E8A19", "#67CF5C", "#8CF47E", "#608218", "#A3C55B", "#C8E97D",
    "#897618", "#D0B85A", "#F7DB7C", "#AC6619", "#F7A75A", "#CC4F1B", "#EA1D1D",
    "#3EFE44", "#73CF10", "#9AF443", "#AAC510", "#D0E942", "#D5B811", "#FCDB42",
    "#FBA714"};

}  // namespace

TEST_CASE("load_uw71 shape and fixed rows") {
  const ColorLibrary lib = load_uw71();
  REQUIRE(lib.size() == 71);
  CHECK(lib.name == "UW-71");

  CHECK(lib.colors[0].lab.L == 50.0);
  CHECK(lib.colors[0].lab.a == 28.891);
  CHECK(lib.colors[0].lab.b == -73.589);

  CHECK(lib.colors[24].lab.L == 0.0);
  CHECK(lib.colors[24].lab.a == 0.0);
  CHECK(lib.colors[24].lab.b == 0.0);
  CHECK(lib.colors[24].sorted_position == 6);

  int count_l88 = 0;
  std::map<double, int> lightness;
  for (const ColorSpec& c : lib.colors) {
    if (c.lab.L == 88.0) ++count_l88;
    lightness[c.lab.L]++;
  }
  CHECK(count_l88 == 13);
  const std::map<double, int> expected{{0.0, 1},  {25.0, 11}, {50.0, 27},
                                       {75.0, 18}, {88.0, 13}, {100.0, 1}};
  CHECK(lightness == expected);
}

TEST_CASE("load_uw71 sorted_position is a permutation of 1..71") {
  const ColorLibrary lib = load_uw71();
  std::set<int> positions;
  for (const ColorSpec& c : lib.colors) positions.insert(c.sorted_position);
  CHECK(positions.size() == 71);
  CHECK(*positions.begin() == 1);
  CHECK(*positions.rbegin() == 71);
}

TEST_CASE("load_uw71 derived fields are consistent") {
  const ColorLibrary lib = load_uw71();
  for (const ColorSpec& c : lib.colors) {
    const LchColor lch = lab_to_lch(c.lab);
    CHECK(c.lch.L == lch.L);
    CHECK(c.lch.C == lch.C);
    CHECK(c.lch.h == lch.h);
    const HexColor hex = lab_to_hex(c.lab, lib.white_point);
    CHECK(c.hex == hex.hex);
    CHECK(c.clamped == hex.clamped);
  }
}

TEST_CASE("load_uw71 hexes match the independent reference, none clamped") {
  const ColorLibrary lib = load_uw71();
  for (std::size_t i = 0; i < 71; ++i) {
    CAPTURE(i);
    CHECK(lib.colors[i].hex == kExpectedHex[i]);
    CHECK_FALSE(lib.colors[i].clamped);
  }
}

TEST_CASE("load_uw71 is bit-stable across loads") {
  const ColorLibrary a = load_uw71();
  const ColorLibrary b = load_uw71();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.colors[i].lab.L == b.colors[i].lab.L);
    CHECK(a.colors[i].lab.a == b.colors[i].lab.a);
    CHECK(a.colors[i].lab.b == b.colors[i].lab.b);
    CHECK(a.colors[i].lch.h == b.colors[i].lch.h);
    CHECK(a.colors[i].hex == b.colors[i].hex);
    CHECK(a.colors[i].sorted_position == b.colors[i].sorted_position);
  }
}

TEST_CASE("generate_grid_library single plane 3x3") {
  const ColorLibrary lib = generate_grid_library(
      25.0, {50.0}, [](const LabColor&) { return true; }, 25.0);
  REQUIRE(lib.size() == 9);
  // ordered by (L, a, b) lexicographically
  for (std::size_t i = 1; i < lib.size(); ++i) {
    const LabColor& p = lib.colors[i - 1].lab;
    const LabColor& q = lib.colors[i].lab;
    const bool ordered = p.a < q.a || (p.a == q.a && p.b < q.b);
    CHECK(ordered);
  }
  CHECK(lib.colors[0].lab.a == -25.0);
  CHECK(lib.colors[0].lab.b == -25.0);
  CHECK(lib.colors[8].lab.a == 25.0);
  CHECK(lib.colors[8].lab.b == 25.0);
}

TEST_CASE("generate_grid_library lattice distances") {
  const ColorLibrary lib = generate_grid_library(
      25.0, {0.0, 25.0, 50.0, 75.0, 88.0, 100.0},
      [](const LabColor& c) { return in_srgb_gamut(c); }, 100.0);
  REQUIRE(lib.size() > 9);

  // adjacent lattice points sit at mutual distance exactly delta_e
  int neighbor_pairs = 0;
  double min_pair = 1e9;
  for (std::size_t i = 0; i < lib.size(); ++i) {
    for (std::size_t j = i + 1; j < lib.size(); ++j) {
      const double d = delta_e76(lib.colors[i].lab, lib.colors[j].lab);
      min_pair = std::min(min_pair, d);
      if (std::fabs(d - 25.0) < 1e-9) ++neighbor_pairs;
    }
  }
  CHECK(neighbor_pairs > 0);
  // smallest plane separation is 100 - 88 = 12
  CHECK(min_pair >= 12.0 - 1e-9);
}

TEST_CASE("generate_grid_library empty filter") {
  CHECK_THROWS_AS(generate_grid_library(25.0, {50.0},
                                        [](const LabColor&) { return false; }, 25.0),
                  EmptyLibraryError);
  CHECK_THROWS_AS(generate_grid_library(-1.0, {50.0},
                                        [](const LabColor&) { return true; }, 25.0),
                  ValidationError);
}

TEST_CASE("sort_by_hue_chroma") {
  SUBCASE("single color") {
    ColorLibrary lib;
    lib.name = "one";
    ColorSpec c;
    c.index = 1;
    c.lab = LabColor{50, 10, 10};
    c.lch = lab_to_lch(c.lab);
    lib.colors.push_back(c);
    CHECK(sort_by_hue_chroma(lib) == std::vector<int>{1});
  }

  SUBCASE("achromatic colors lead, ordered by descending lightness") {
    const ColorLibrary lib = load_uw71();
    const std::vector<int> ranks = sort_by_hue_chroma(lib);
    // the neutral axis occupies ranks 1..6; black (index 25, L=0) is rank 6
    CHECK(ranks[28] == 1);  // L=100
    CHECK(ranks[29] == 2);  // L=88
    CHECK(ranks[27] == 3);  // L=75
    CHECK(ranks[26] == 4);  // L=50
    CHECK(ranks[25] == 5);  // L=25
    CHECK(ranks[24] == 6);  // black
  }

  SUBCASE("equal hue sorts lower chroma first") {
    ColorLibrary lib;
    lib.name = "two";
    for (int i = 0; i < 2; ++i) {
      ColorSpec c;
      c.index = i + 1;
      c.lch = LchColor{50.0, i == 0 ? 20.0 : 10.0, 40.0};
      c.lab = lch_to_lab(c.lch);
      lib.colors.push_back(c);
    }
    const std::vector<int> ranks = sort_by_hue_chroma(lib);
    CHECK(ranks[0] == 2);  // C=20 second
    CHECK(ranks[1] == 1);  // C=10 first
  }
}

TEST_CASE("library CSV round trip is canonical") {
  testutil::TempDir tmp("colorlib");
  const ColorLibrary lib = load_uw71();
  const std::string p1 = tmp.str("lib1.csv");
  const std::string p2 = tmp.str("lib2.csv");
  write_library_csv(lib, p1);
  const ColorLibrary back = read_library_csv(p1, "UW-71");
  REQUIRE(back.size() == lib.size());
  CHECK(back.colors[0].hex == lib.colors[0].hex);
  CHECK(back.colors[24].sorted_position == 6);
  write_library_csv(back, p2);
  CHECK(testutil::read_file(p1) == testutil::read_file(p2));
}

TEST_CASE("read_library_csv rejects a wrong header") {
  testutil::TempDir tmp("colorlib_bad");
  testutil::write_file(tmp.str("bad.csv"), "a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(read_library_csv(tmp.str("bad.csv")), SchemaError);
}
