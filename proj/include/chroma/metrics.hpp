#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chroma/error.hpp"
#include "chroma/types.hpp"

namespace chroma {

// Per-concept human rating matrix, participants x colors.
struct HumanRatingSet {
  std::string concept_name;
  Matrix ratings;
  std::vector<std::string> participant_ids;

  int participants() const { return static_cast<int>(ratings.rows()); }
  int colors() const { return static_cast<int>(ratings.cols()); }
  Vector mean_per_color() const { return ratings.colwise().mean(); }
};

struct ConceptEvaluation {
  std::string concept_name;
  double pearson_r = 0.0;
  bool significant = false;
  double split_half_r = 0.0;
  double specificity = 0.0;
  std::optional<double> concreteness;
};

struct RegressionSummary {
  std::vector<std::string> names;  // predictors, then "intercept"
  Vector coefficients;
  Vector t_statistics;
  Vector p_values;
  double r_squared = 0.0;
};

struct PairedTResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;
  double mean_diff = 0.0;
};

// Sample Pearson product-moment correlation. Throws ValidationError on a
// length mismatch or fewer than 3 points, UndefinedStatisticError when either
// argument is constant.
template <typename DerivedX, typename DerivedY>
double pearson(const Eigen::MatrixBase<DerivedX>& x,
               const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  if (x.size() < 3) throw ValidationError("pearson: need at least 3 points");
  const Vector xc = x.derived().template cast<double>().array() - x.derived().template cast<double>().mean();
  const Vector yc = y.derived().template cast<double>().array() - y.derived().template cast<double>().mean();
  const double nx = xc.norm();
  const double ny = yc.norm();
  if (nx == 0.0 || ny == 0.0) {
    throw UndefinedStatisticError("pearson: correlation undefined for a constant vector");
  }
  // rounding can push the ratio a ulp past 1
  return std::clamp(xc.dot(yc) / (nx * ny), -1.0, 1.0);
}

// Spearman-Brown step-up: 2r / (1 + r). Defined on (-1, 1].
double spearman_brown(double r);

// Randomly halves participants n_iterations times; returns the mean
// Spearman-Brown-corrected between-half correlation across colors.
double split_half_reliability(const HumanRatingSet& h, int n_iterations,
                              std::uint64_t seed);

// Two-tailed critical Pearson r at significance alpha with df degrees of
// freedom: t* / sqrt(t*^2 + df).
double critical_r(double alpha, int df);

bool is_significant(double r, double alpha, int df);

// Paired-samples t test, two-tailed.
PairedTResult paired_t_test(const Vector& a, const Vector& b);

// Shannon entropy (nats) of values normalized to a probability vector.
// Summation is done in sorted order so the result is exactly
// permutation-invariant.
double shannon_entropy(const Vector& values);

// Peakiness of a distribution relative to a cohort: ln(1 - H_norm + eps)
// where H_norm min-max-normalizes this distribution's entropy across
// cohort_entropies. Higher = more specific.
double specificity(const Vector& values, const std::vector<double>& cohort_entropies);

constexpr double kSpecificityEpsilon = 1e-6;

// Entropies, normalized entropies and specificities for a whole cohort.
struct CohortSpecificity {
  std::vector<double> entropy;
  std::vector<double> entropy_norm;
  std::vector<double> specificity;
};
CohortSpecificity cohort_specificity(const std::vector<Vector>& distributions);

// OLS with an intercept appended as the last column. Reports per-coefficient
// t statistics and two-tailed p values plus r^2.
RegressionSummary regress(const std::vector<std::string>& names,
                          const std::vector<Vector>& predictors,
                          const Vector& response);

// Correlation against human means as a function of how many repetitions are
// averaged. reps_by_color is colors x repetitions; entry k-1 of the result
// uses the first k repetitions, averaged over n_shuffles random permutations
// of each color's repetitions (0 = use given order).
std::vector<double> learning_curve(const Matrix& reps_by_color,
                                   const Vector& human_means, int max_k,
                                   std::uint64_t seed, int n_shuffles = 0);

struct EvaluationOptions {
  double alpha = 0.05;
  int n_comparisons = 0;  // 0 = number of evaluated concepts
  int split_half_iterations = 50;
  std::uint64_t seed = 0;
};

// Full per-concept evaluation of model distributions against human ratings.
// Specificity is computed from the human mean ratings across the evaluated
// cohort. Concept order of `model` is preserved.
std::vector<ConceptEvaluation> evaluate_concepts(
    const std::vector<std::pair<std::string, Vector>>& model,
    const std::map<std::string, HumanRatingSet>& human,
    const std::function<std::optional<double>(const std::string&)>& concreteness,
    const EvaluationOptions& opts);

}  // namespace chroma
