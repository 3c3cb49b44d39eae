#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chroma/colorlib.hpp"
#include "chroma/types.hpp"

namespace chroma {

struct AssociationDistribution;

// Design matrix with one row per library color and columns
// L, C, cos(h), sin(h), cos(2h), sin(2h), 1.
struct ColorimetricDesign {
  Matrix columns;  // n x 7
  static constexpr int kCoefficients = 7;
  int rows() const { return static_cast<int>(columns.rows()); }
};

// Per-concept OLS model over the colorimetric predictors.
struct ColorimetricFit {
  std::string concept_name;
  double w_L = 0.0;
  double w_C = 0.0;
  double w_cos_h = 0.0;
  double w_sin_h = 0.0;
  double w_cos_2h = 0.0;
  double w_sin_2h = 0.0;
  double k = 0.0;
  std::optional<double> fit_r;  // absent for a constant association vector
  double dominant_hue_deg = 0.0;
  double dominant_axis_deg = 0.0;

  Vector coefficients() const;
};

ColorimetricDesign build_design(const ColorLibrary& lib);

ColorimetricFit fit_concept(const ColorimetricDesign& design,
                            const std::string& concept_name,
                            const Vector& associations);
ColorimetricFit fit_concept(const ColorimetricDesign& design,
                            const AssociationDistribution& associations);

// design row . coefficients per color; deliberately not clamped to [0, 1].
Vector predict(const ColorimetricFit& fit, const ColorLibrary& lib);
Vector predict(const ColorimetricFit& fit, const ColorimetricDesign& design);

// Dominant direction helpers (degrees): first harmonic -> hue in [0, 360),
// second harmonic -> axis in [0, 180).
double dominant_hue_deg(double w_cos_h, double w_sin_h);
double dominant_axis_deg(double w_cos_2h, double w_sin_2h);

// CSV export, one row per fit.
void write_fits_csv(const std::vector<ColorimetricFit>& fits, const std::string& path);

}  // namespace chroma
