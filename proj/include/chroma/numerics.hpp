#pragma once

namespace chroma {

// Regularized incomplete beta function I_x(a, b), x in [0, 1], a, b > 0.
double regularized_incomplete_beta(double x, double a, double b);

// Student-t distribution with df > 0 degrees of freedom.
double student_t_pdf(double x, double df);
double student_t_cdf(double x, double df);
double student_t_sf(double x, double df);  // 1 - cdf, upper tail
// Inverse CDF; p in (0, 1).
double student_t_quantile(double p, double df);

}  // namespace chroma
