#pragma once

#include <string>

namespace chroma {

// CIE 1931 chromaticity + luminance. Y is on a 0-100 scale.
struct XyYColor {
  double x = 0.0;
  double y = 0.0;
  double Y = 0.0;
};

// CIE XYZ tristimulus values, 0-100 scale.
struct XyzColor {
  double X = 0.0;
  double Y = 0.0;
  double Z = 0.0;
};

// CIELAB. L in [0, 100]; a green-red; b blue-yellow.
struct LabColor {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

// Cylindrical CIELAB. h in degrees, [0, 360); h = 0 for achromatic colors.
struct LchColor {
  double L = 0.0;
  double C = 0.0;
  double h = 0.0;
};

// 8-bit sRGB. `clamped` is set when the source color fell outside the sRGB
// gamut and channels were projected onto it.
struct SrgbColor {
  int r = 0;
  int g = 0;
  int b = 0;
  bool clamped = false;
};

// Reference white as chromaticity; Y fixed at 100. Default is D65 at the
// precision matching tristimulus (95.047, 100, 108.883).
struct WhitePoint {
  double x = 0.31273;
  double y = 0.32902;
  double Y = 100.0;
};

inline WhitePoint d65() { return WhitePoint{}; }

struct HexColor {
  std::string hex;  // "#RRGGBB", uppercase
  bool clamped = false;
};

XyzColor xyy_to_xyz(const XyYColor& c);
XyYColor xyz_to_xyy(const XyzColor& c);

LabColor xyz_to_lab(const XyzColor& c, const WhitePoint& w = d65());
XyzColor lab_to_xyz(const LabColor& c, const WhitePoint& w = d65());

LchColor lab_to_lch(const LabColor& c);
LabColor lch_to_lab(const LchColor& c);

SrgbColor lab_to_srgb(const LabColor& c, const WhitePoint& w = d65());
HexColor lab_to_hex(const LabColor& c, const WhitePoint& w = d65());
std::string to_hex_string(const SrgbColor& c);

// CIE76 color difference: Euclidean distance in Lab.
double delta_e76(const LabColor& a, const LabColor& b);

// True when the color converts to sRGB without gamut clamping.
bool in_srgb_gamut(const LabColor& c, const WhitePoint& w = d65());

// "#RRGGBB" with hex digits (either case).
bool is_well_formed_hex(const std::string& hex);

}  // namespace chroma
