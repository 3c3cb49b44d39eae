#include "chroma/colorspace.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "chroma/types.hpp"

namespace chroma {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

// CIELAB companding threshold (6/29).
constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t)
                                      : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
  return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

Vector3 to_vec(const XyzColor& c) { return Vector3(c.X, c.Y, c.Z); }

// XYZ -> linear sRGB matrix derived from the sRGB primaries and the given
// white point, so the white point itself maps exactly to RGB (1,1,1).
Matrix3 xyz_to_linear_rgb_matrix(const WhitePoint& w) {
  constexpr double px[3] = {0.64, 0.30, 0.15};
  constexpr double py[3] = {0.33, 0.60, 0.06};
  Matrix3 primaries;
  for (int i = 0; i < 3; ++i) {
    primaries.col(i) = Vector3(px[i] / py[i], 1.0, (1.0 - px[i] - py[i]) / py[i]);
  }
  const Vector3 white(w.x / w.y, 1.0, (1.0 - w.x - w.y) / w.y);
  const Vector3 scale = primaries.partialPivLu().solve(white);
  return (primaries * scale.asDiagonal()).inverse();
}

double srgb_gamma(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

int to_channel(double c) {
  return static_cast<int>(std::floor(srgb_gamma(c) * 255.0 + 0.5));
}

}  // namespace

XyzColor xyy_to_xyz(const XyYColor& c) {
  if (c.y <= 0.0) return XyzColor{0.0, 0.0, 0.0};
  return XyzColor{c.x * c.Y / c.y, c.Y, (1.0 - c.x - c.y) * c.Y / c.y};
}

XyYColor xyz_to_xyy(const XyzColor& c) {
  const double sum = c.X + c.Y + c.Z;
  if (sum <= 0.0) return XyYColor{0.0, 0.0, 0.0};
  return XyYColor{c.X / sum, c.Y / sum, c.Y};
}

LabColor xyz_to_lab(const XyzColor& c, const WhitePoint& w) {
  const XyzColor n = xyy_to_xyz(XyYColor{w.x, w.y, w.Y});
  const double fx = lab_f(c.X / n.X);
  const double fy = lab_f(c.Y / n.Y);
  const double fz = lab_f(c.Z / n.Z);
  return LabColor{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

XyzColor lab_to_xyz(const LabColor& c, const WhitePoint& w) {
  const XyzColor n = xyy_to_xyz(XyYColor{w.x, w.y, w.Y});
  const double fy = (c.L + 16.0) / 116.0;
  const double fx = fy + c.a / 500.0;
  const double fz = fy - c.b / 200.0;
  return XyzColor{n.X * lab_f_inv(fx), n.Y * lab_f_inv(fy), n.Z * lab_f_inv(fz)};
}

LchColor lab_to_lch(const LabColor& c) {
  const double C = std::hypot(c.a, c.b);
  if (C == 0.0) return LchColor{c.L, 0.0, 0.0};
  double h = std::atan2(c.b, c.a) * kDeg;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return LchColor{c.L, C, h};
}

LabColor lch_to_lab(const LchColor& c) {
  const double rad = c.h / kDeg;
  return LabColor{c.L, c.C * std::cos(rad), c.C * std::sin(rad)};
}

SrgbColor lab_to_srgb(const LabColor& c, const WhitePoint& w) {
  const Matrix3 m = xyz_to_linear_rgb_matrix(w);
  Vector3 lin = m * (to_vec(lab_to_xyz(c, w)) / 100.0);
  // Tolerate float residue at the gamut boundary before flagging.
  constexpr double kEps = 1e-12;
  const bool clamped = (lin.array() < -kEps).any() || (lin.array() > 1.0 + kEps).any();
  lin = lin.cwiseMax(0.0).cwiseMin(1.0);
  return SrgbColor{to_channel(lin[0]), to_channel(lin[1]), to_channel(lin[2]),
                   clamped};
}

std::string to_hex_string(const SrgbColor& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", c.r, c.g, c.b);
  return buf;
}

HexColor lab_to_hex(const LabColor& c, const WhitePoint& w) {
  const SrgbColor s = lab_to_srgb(c, w);
  return HexColor{to_hex_string(s), s.clamped};
}

double delta_e76(const LabColor& a, const LabColor& b) {
  const double dL = a.L - b.L;
  const double da = a.a - b.a;
  const double db = a.b - b.b;
  return std::sqrt(dL * dL + da * da + db * db);
}

bool in_srgb_gamut(const LabColor& c, const WhitePoint& w) {
  return !lab_to_srgb(c, w).clamped;
}

bool is_well_formed_hex(const std::string& hex) {
  if (hex.size() != 7 || hex[0] != '#') return false;
  for (std::size_t i = 1; i < 7; ++i) {
    if (!std::isxdigit(static_cast<unsigned char>(hex[i]))) return false;
  }
  return true;
}

}  // namespace chroma
