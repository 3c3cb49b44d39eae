#include "chroma/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "chroma/numerics.hpp"
#include "chroma/rng.hpp"

namespace chroma {

double spearman_brown(double r) {
  if (r <= -1.0 || r > 1.0) {
    throw UndefinedStatisticError("spearman_brown: r must lie in (-1, 1]");
  }
  return 2.0 * r / (1.0 + r);
}

double split_half_reliability(const HumanRatingSet& h, int n_iterations,
                              std::uint64_t seed) {
  const int n = h.participants();
  if (n < 2) {
    throw ValidationError("split_half_reliability: need at least 2 participants");
  }
  if (n_iterations < 1) {
    throw ValidationError("split_half_reliability: need at least 1 iteration");
  }
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  const int half = n / 2;
  double total = 0.0;
  for (int it = 0; it < n_iterations; ++it) {
    constexpr int kMaxResamples = 100;
    bool done = false;
    for (int attempt = 0; attempt < kMaxResamples && !done; ++attempt) {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      rng.shuffle(idx);
      Vector mean_a = Vector::Zero(h.colors());
      Vector mean_b = Vector::Zero(h.colors());
      for (int i = 0; i < half; ++i) mean_a += h.ratings.row(idx[i]).transpose();
      for (int i = half; i < n; ++i) mean_b += h.ratings.row(idx[i]).transpose();
      mean_a /= half;
      mean_b /= n - half;
      try {
        total += spearman_brown(pearson(mean_a, mean_b));
        done = true;
      } catch (const UndefinedStatisticError&) {
        // constant half-mean vector; draw another split
      }
    }
    if (!done) {
      throw UndefinedStatisticError(
          "split_half_reliability: half means stayed constant after resampling");
    }
  }
  return total / n_iterations;
}

double critical_r(double alpha, int df) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("critical_r: alpha must be in (0, 1)");
  }
  if (df < 1) throw ValidationError("critical_r: df must be >= 1");
  const double t = student_t_quantile(1.0 - alpha / 2.0, df);
  return t / std::sqrt(t * t + df);
}

bool is_significant(double r, double alpha, int df) {
  return r > critical_r(alpha, df);
}

PairedTResult paired_t_test(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ValidationError("paired_t_test: length mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 2) throw ValidationError("paired_t_test: need at least 2 pairs");
  const Vector d = a - b;
  const double mean = d.mean();
  const double ss = (d.array() - mean).matrix().squaredNorm();
  const double sd = std::sqrt(ss / (n - 1));
  if (sd == 0.0) {
    throw UndefinedStatisticError("paired_t_test: differences have zero variance");
  }
  PairedTResult res;
  res.mean_diff = mean;
  res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  res.df = n - 1;
  res.p = 2.0 * student_t_sf(std::fabs(res.t), res.df);
  return res;
}

double shannon_entropy(const Vector& values) {
  if (values.size() == 0) throw ValidationError("shannon_entropy: empty vector");
  std::vector<double> v;
  v.reserve(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) {
      throw ValidationError("shannon_entropy: values must be non-negative");
    }
    if (values[i] > 0.0) v.push_back(values[i]);
  }
  if (v.empty()) {
    throw UndefinedStatisticError("shannon_entropy: all values are zero");
  }
  // Accumulate in sorted order so the result is exactly permutation-invariant.
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double q : v) sum += q;
  double h = 0.0;
  for (double q : v) {
    const double p = q / sum;
    h -= p * std::log(p);
  }
  return h;
}

double specificity(const Vector& values, const std::vector<double>& cohort_entropies) {
  if (cohort_entropies.size() < 2) {
    throw UndefinedStatisticError(
        "specificity: cohort of size < 2 leaves normalization undefined");
  }
  const double h = shannon_entropy(values);
  const auto [lo_it, hi_it] =
      std::minmax_element(cohort_entropies.begin(), cohort_entropies.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const bool member = std::any_of(cohort_entropies.begin(), cohort_entropies.end(),
                                  [&](double e) { return std::fabs(e - h) <= 1e-9; });
  if (!member) {
    throw ValidationError("specificity: cohort_entropies must contain this entropy");
  }
  if (hi == lo) {
    throw UndefinedStatisticError("specificity: cohort entropies are all equal");
  }
  const double h_norm = (h - lo) / (hi - lo);
  return std::log(1.0 - h_norm + kSpecificityEpsilon);
}

CohortSpecificity cohort_specificity(const std::vector<Vector>& distributions) {
  CohortSpecificity out;
  out.entropy.reserve(distributions.size());
  for (const Vector& v : distributions) out.entropy.push_back(shannon_entropy(v));
  if (distributions.size() < 2) {
    throw UndefinedStatisticError(
        "cohort_specificity: cohort of size < 2 leaves normalization undefined");
  }
  const auto [lo_it, hi_it] = std::minmax_element(out.entropy.begin(), out.entropy.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) {
    throw UndefinedStatisticError("cohort_specificity: cohort entropies are all equal");
  }
  for (double h : out.entropy) {
    const double h_norm = (h - lo) / (hi - lo);
    out.entropy_norm.push_back(h_norm);
    out.specificity.push_back(std::log(1.0 - h_norm + kSpecificityEpsilon));
  }
  return out;
}

RegressionSummary regress(const std::vector<std::string>& names,
                          const std::vector<Vector>& predictors,
                          const Vector& response) {
  if (names.size() != predictors.size()) {
    throw ValidationError("regress: names/predictors size mismatch");
  }
  const int n = static_cast<int>(response.size());
  const int k = static_cast<int>(predictors.size());
  const int p = k + 1;  // + intercept
  if (n <= p) throw ValidationError("regress: need more observations than coefficients");
  for (const Vector& col : predictors) {
    if (col.size() != n) throw ValidationError("regress: predictor length mismatch");
  }

  Matrix X(n, p);
  for (int j = 0; j < k; ++j) X.col(j) = predictors[j];
  X.col(k).setOnes();

  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) throw SingularDesignError("regress: design matrix is rank-deficient");

  RegressionSummary out;
  out.names = names;
  out.names.push_back("intercept");
  out.coefficients = qr.solve(response);

  const Vector residuals = response - X * out.coefficients;
  const double rss = residuals.squaredNorm();
  const double sigma2 = rss / (n - p);
  const Matrix cov = sigma2 * (X.transpose() * X).inverse();

  out.t_statistics.resize(p);
  out.p_values.resize(p);
  for (int j = 0; j < p; ++j) {
    const double se = std::sqrt(cov(j, j));
    out.t_statistics[j] = out.coefficients[j] / se;
    out.p_values[j] = 2.0 * student_t_sf(std::fabs(out.t_statistics[j]), n - p);
  }

  const double tss = (response.array() - response.mean()).matrix().squaredNorm();
  if (tss > 0.0) {
    out.r_squared = 1.0 - rss / tss;
  } else {
    out.r_squared = rss <= 1e-24 ? 1.0 : 0.0;
  }
  return out;
}

std::vector<double> learning_curve(const Matrix& reps_by_color,
                                   const Vector& human_means, int max_k,
                                   std::uint64_t seed, int n_shuffles) {
  const int colors = static_cast<int>(reps_by_color.rows());
  const int reps = static_cast<int>(reps_by_color.cols());
  if (human_means.size() != colors) {
    throw ValidationError("learning_curve: human_means length mismatch");
  }
  if (max_k < 1 || max_k > reps) {
    throw ValidationError("learning_curve: need at least max_k repetitions per color");
  }

  std::vector<double> curve(max_k, 0.0);
  const int passes = std::max(1, n_shuffles);
  std::vector<int> perm(reps);
  Matrix prefix_mean(colors, max_k);
  for (int s = 0; s < passes; ++s) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s));
    for (int c = 0; c < colors; ++c) {
      std::iota(perm.begin(), perm.end(), 0);
      if (n_shuffles > 0) rng.shuffle(perm);
      double running = 0.0;
      for (int k = 0; k < max_k; ++k) {
        running += reps_by_color(c, perm[k]);
        prefix_mean(c, k) = running / (k + 1);
      }
    }
    for (int k = 0; k < max_k; ++k) {
      curve[k] += pearson(human_means, prefix_mean.col(k));
    }
  }
  for (double& v : curve) v /= passes;
  return curve;
}

std::vector<ConceptEvaluation> evaluate_concepts(
    const std::vector<std::pair<std::string, Vector>>& model,
    const std::map<std::string, HumanRatingSet>& human,
    const std::function<std::optional<double>(const std::string&)>& concreteness,
    const EvaluationOptions& opts) {
  if (model.empty()) throw ValidationError("evaluate_concepts: no distributions");
  const int m = opts.n_comparisons > 0 ? opts.n_comparisons
                                       : static_cast<int>(model.size());

  // Specificity cohort from human mean ratings, in model order.
  std::vector<Vector> human_means;
  human_means.reserve(model.size());
  for (const auto& [concept_name, values] : model) {
    const auto it = human.find(concept_name);
    if (it == human.end()) {
      throw ValidationError("evaluate_concepts: no human ratings for concept '" +
                            concept_name + "'");
    }
    if (it->second.colors() != values.size()) {
      throw ValidationError("evaluate_concepts: color count mismatch for '" +
                            concept_name + "'");
    }
    human_means.push_back(it->second.mean_per_color());
  }
  const CohortSpecificity spec = cohort_specificity(human_means);

  std::vector<ConceptEvaluation> out;
  out.reserve(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& [concept_name, values] = model[i];
    const HumanRatingSet& hset = human.at(concept_name);
    ConceptEvaluation ev;
    ev.concept_name = concept_name;
    try {
      ev.pearson_r = pearson(values, human_means[i]);
    } catch (const UndefinedStatisticError& e) {
      throw UndefinedStatisticError("concept '" + concept_name + "': " + e.what());
    }
    const int df = static_cast<int>(values.size()) - 2;
    ev.significant = is_significant(ev.pearson_r, opts.alpha / m, df);
    ev.split_half_r = split_half_reliability(
        hset, opts.split_half_iterations,
        Rng::stream(opts.seed, concept_name).next_u64());
    ev.specificity = spec.specificity[i];
    ev.concreteness = concreteness ? concreteness(concept_name) : std::nullopt;
    out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace chroma
