#include "chroma/regression.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "chroma/csv.hpp"
#include "chroma/error.hpp"
#include "chroma/estimator.hpp"
#include "chroma/metrics.hpp"

namespace chroma {

namespace {
constexpr double kRad = std::numbers::pi / 180.0;
}

Vector ColorimetricFit::coefficients() const {
  Vector v(7);
  v << w_L, w_C, w_cos_h, w_sin_h, w_cos_2h, w_sin_2h, k;
  return v;
}

ColorimetricDesign build_design(const ColorLibrary& lib) {
  if (lib.colors.empty()) throw ValidationError("build_design: empty library");
  ColorimetricDesign d;
  d.columns.resize(static_cast<Eigen::Index>(lib.colors.size()), 7);
  for (std::size_t i = 0; i < lib.colors.size(); ++i) {
    const LchColor& c = lib.colors[i].lch;
    const double h = c.h * kRad;
    d.columns.row(static_cast<Eigen::Index>(i))
        << c.L, c.C, std::cos(h), std::sin(h), std::cos(2.0 * h), std::sin(2.0 * h), 1.0;
  }
  return d;
}

double dominant_hue_deg(double w_cos_h, double w_sin_h) {
  double deg = std::atan2(w_sin_h, w_cos_h) / kRad;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

double dominant_axis_deg(double w_cos_2h, double w_sin_2h) {
  double deg = std::atan2(w_sin_2h, w_cos_2h) / (2.0 * kRad);
  if (deg < 0.0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  return deg;
}

ColorimetricFit fit_concept(const ColorimetricDesign& design,
                            const std::string& concept_name,
                            const Vector& associations) {
  if (associations.size() != design.rows()) {
    throw ValidationError("fit_concept: association length does not match design");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(design.columns);
  qr.setThreshold(1e-10);
  if (qr.rank() < ColorimetricDesign::kCoefficients) {
    throw SingularDesignError("fit_concept: design matrix is rank-deficient");
  }
  const Vector beta = qr.solve(associations);

  ColorimetricFit fit;
  fit.concept_name = concept_name;
  fit.w_L = beta[0];
  fit.w_C = beta[1];
  fit.w_cos_h = beta[2];
  fit.w_sin_h = beta[3];
  fit.w_cos_2h = beta[4];
  fit.w_sin_2h = beta[5];
  fit.k = beta[6];
  fit.dominant_hue_deg = dominant_hue_deg(fit.w_cos_h, fit.w_sin_h);
  fit.dominant_axis_deg = dominant_axis_deg(fit.w_cos_2h, fit.w_sin_2h);

  const Vector predicted = design.columns * beta;
  try {
    fit.fit_r = pearson(predicted, associations);
  } catch (const UndefinedStatisticError&) {
    fit.fit_r = std::nullopt;  // constant associations
  }
  return fit;
}

ColorimetricFit fit_concept(const ColorimetricDesign& design,
                            const AssociationDistribution& associations) {
  return fit_concept(design, associations.concept_name, associations.values);
}

Vector predict(const ColorimetricFit& fit, const ColorimetricDesign& design) {
  return design.columns * fit.coefficients();
}

Vector predict(const ColorimetricFit& fit, const ColorLibrary& lib) {
  return predict(fit, build_design(lib));
}

void write_fits_csv(const std::vector<ColorimetricFit>& fits, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write fits CSV: " + path);
  out << "concept,w_L,w_C,w_cos_h,w_sin_h,w_cos_2h,w_sin_2h,k,fit_r,"
         "dominant_hue_deg,dominant_axis_deg\n";
  for (const ColorimetricFit& f : fits) {
    out << csv::escape(f.concept_name) << ',' << csv::format_double(f.w_L) << ','
        << csv::format_double(f.w_C) << ',' << csv::format_double(f.w_cos_h) << ','
        << csv::format_double(f.w_sin_h) << ',' << csv::format_double(f.w_cos_2h)
        << ',' << csv::format_double(f.w_sin_2h) << ',' << csv::format_double(f.k)
        << ',' << (f.fit_r ? csv::format_double(*f.fit_r) : std::string()) << ','
        << csv::format_double(f.dominant_hue_deg) << ','
        << csv::format_double(f.dominant_axis_deg) << '\n';
  }
}

}  // namespace chroma
