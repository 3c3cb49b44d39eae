#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chroma/colorlib.hpp"
#include "chroma/colorspace.hpp"
#include "chroma/rng.hpp"

using namespace chroma;

TEST_CASE("xyy_to_xyz basics") {
  const XyzColor white = xyy_to_xyz(XyYColor{0.31273, 0.32902, 100.0});
  CHECK(std::fabs(white.X - 95.047) < 0.01);
  CHECK(white.Y == 100.0);
  CHECK(std::fabs(white.Z - 108.883) < 0.01);

  const XyzColor black = xyy_to_xyz(XyYColor{0.3, 0.0, 0.0});
  CHECK(black.X == 0.0);
  CHECK(black.Y == 0.0);
  CHECK(black.Z == 0.0);
}

TEST_CASE("xyz_to_lab reference points") {
  const WhitePoint w = d65();
  const LabColor white = xyz_to_lab(xyy_to_xyz(XyYColor{w.x, w.y, w.Y}), w);
  CHECK(white.L == doctest::Approx(100.0));
  CHECK(white.a == doctest::Approx(0.0));
  CHECK(white.b == doctest::Approx(0.0));

  const LabColor black = xyz_to_lab(XyzColor{0, 0, 0}, w);
  CHECK(black.L == doctest::Approx(0.0));
  CHECK(black.a == doctest::Approx(0.0));
  CHECK(black.b == doctest::Approx(0.0));

  const LabColor row2 = xyz_to_lab(xyy_to_xyz(XyYColor{0.1742, 0.082514, 4.4155}), w);
  CHECK(std::fabs(row2.L - 25.0) < 0.01);
  CHECK(std::fabs(row2.a - 53.857) < 0.01);
  CHECK(std::fabs(row2.b - (-72.28)) < 0.01);
}

TEST_CASE("library rows convert to their tabulated Lab within 0.01") {
  const ColorLibrary lib = load_uw71();
  for (const ColorSpec& c : lib.colors) {
    const LabColor lab = xyz_to_lab(xyy_to_xyz(c.xyy), lib.white_point);
    CAPTURE(c.index);
    CHECK(std::fabs(lab.L - c.lab.L) < 0.01);
    CHECK(std::fabs(lab.a - c.lab.a) < 0.01);
    CHECK(std::fabs(lab.b - c.lab.b) < 0.01);
  }
}

TEST_CASE("lab_to_xyz inverts xyz_to_lab") {
  const WhitePoint w = d65();
  const XyzColor wp = lab_to_xyz(LabColor{100, 0, 0}, w);
  CHECK(wp.X == doctest::Approx(xyy_to_xyz(XyYColor{w.x, w.y, w.Y}).X));
  CHECK(wp.Y == doctest::Approx(100.0));

  const XyzColor zero = lab_to_xyz(LabColor{0, 0, 0}, w);
  CHECK(zero.X == doctest::Approx(0.0));
  CHECK(zero.Y == doctest::Approx(0.0));
  CHECK(zero.Z == doctest::Approx(0.0));

  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const XyzColor v{rng.uniform(0.0, 120.0), rng.uniform(0.0, 100.0),
                     rng.uniform(0.0, 130.0)};
    const XyzColor back = lab_to_xyz(xyz_to_lab(v, w), w);
    CHECK(std::fabs(back.X - v.X) < 1e-9);
    CHECK(std::fabs(back.Y - v.Y) < 1e-9);
    CHECK(std::fabs(back.Z - v.Z) < 1e-9);
  }

  const ColorLibrary lib = load_uw71();
  for (const ColorSpec& c : lib.colors) {
    const XyzColor orig = xyy_to_xyz(c.xyy);
    const XyzColor back = lab_to_xyz(xyz_to_lab(orig, w), w);
    CHECK(std::fabs(back.X - orig.X) < 1e-6);
    CHECK(std::fabs(back.Y - orig.Y) < 1e-6);
    CHECK(std::fabs(back.Z - orig.Z) < 1e-6);
  }
}

TEST_CASE("lab_to_lch") {
  const LchColor c1 = lab_to_lch(LabColor{50, 28.891, -73.589});
  CHECK(c1.C == doctest::Approx(79.0571363).epsilon(1e-6));
  CHECK(c1.h == doctest::Approx(291.4349439).epsilon(1e-6));

  const LchColor achro = lab_to_lch(LabColor{50, 0, 0});
  CHECK(achro.C == 0.0);
  CHECK(achro.h == 0.0);

  const LchColor c3 = lab_to_lch(LabColor{75, -3.9252, 74.897});
  CHECK(c3.h == doctest::Approx(93.0000111).epsilon(1e-6));

  // cylindrical reconstruction recovers (a, b)
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const LabColor lab{rng.uniform(0, 100), rng.uniform(-120, 120),
                       rng.uniform(-120, 120)};
    const LabColor back = lch_to_lab(lab_to_lch(lab));
    CHECK(std::fabs(back.a - lab.a) < 1e-9);
    CHECK(std::fabs(back.b - lab.b) < 1e-9);
    const double h = lab_to_lch(lab).h;
    CHECK(h >= 0.0);
    CHECK(h < 360.0);
  }
}

TEST_CASE("lab_to_hex endpoints and oracle spot check") {
  const HexColor white = lab_to_hex(LabColor{100, 0, 0});
  CHECK(white.hex == "#FFFFFF");
  CHECK_FALSE(white.clamped);

  const HexColor black = lab_to_hex(LabColor{0, 0, 0});
  CHECK(black.hex == "#000000");
  CHECK_FALSE(black.clamped);

  // Frozen from an independent reference conversion.
  const HexColor spot = lab_to_hex(LabColor{50, 28.891, -73.589});
  CHECK(spot.hex == "#2F6EF6");
  CHECK_FALSE(spot.clamped);

  // deterministic: repeated calls yield byte-identical strings
  for (int i = 0; i < 10; ++i) {
    CHECK(lab_to_hex(LabColor{50, 28.891, -73.589}).hex == spot.hex);
  }

  // far outside any display gamut
  const HexColor wild = lab_to_hex(LabColor{50, 200, -200});
  CHECK(wild.clamped);
  CHECK(wild.hex.size() == 7);
}

TEST_CASE("delta_e76 metric properties") {
  const LabColor a{50, 0, 0};
  CHECK(delta_e76(a, a) == 0.0);
  CHECK(delta_e76(a, LabColor{75, 0, 0}) == doctest::Approx(25.0));

  const LabColor row1{50, 28.891, -73.589};
  const LabColor row3{50, 53.857, -72.28};
  CHECK(delta_e76(row1, row3) == doctest::Approx(25.0002927).epsilon(1e-6));

  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto rand_lab = [&] {
      return LabColor{rng.uniform(0, 100), rng.uniform(-128, 128),
                      rng.uniform(-128, 128)};
    };
    const LabColor x = rand_lab(), y = rand_lab(), z = rand_lab();
    const double dxy = delta_e76(x, y);
    CHECK(dxy >= 0.0);
    CHECK(dxy == delta_e76(y, x));
    CHECK(delta_e76(x, z) <= dxy + delta_e76(y, z) + 1e-12);
  }
}

TEST_CASE("is_well_formed_hex") {
  CHECK(is_well_formed_hex("#FFFFFF"));
  CHECK(is_well_formed_hex("#2f6ef6"));
  CHECK_FALSE(is_well_formed_hex("FFFFFF"));
  CHECK_FALSE(is_well_formed_hex("#FFFFF"));
  CHECK_FALSE(is_well_formed_hex("#GGGGGG"));
  CHECK_FALSE(is_well_formed_hex("#FFFFFFF"));
}
