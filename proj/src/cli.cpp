#include "chroma/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chroma/colorlib.hpp"
#include "chroma/csv.hpp"
#include "chroma/error.hpp"
#include "chroma/estimator.hpp"
#include "chroma/http_backend.hpp"
#include "chroma/metrics.hpp"
#include "chroma/regression.hpp"
#include "chroma/rng.hpp"
#include "chroma/store.hpp"
#include "chroma/svg.hpp"

namespace chroma::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- shared helpers ---------------------------------------------------------

LibrarySelector parse_library_selector(const std::string& arg) {
  if (arg == "uw71") return LibrarySelector{"uw71", ""};
  return LibrarySelector{"csv", arg};
}

ColorLibrary load_library(const LibrarySelector& sel) {
  if (sel.kind == "uw71") return load_uw71();
  if (sel.kind == "csv") return read_library_csv(sel.csv_path);
  throw ConfigError("unknown library selector kind: " + sel.kind);
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

std::vector<std::string> parse_concept_list(const std::string& inline_list,
                                            const std::string& file_path) {
  std::vector<std::string> concepts;
  if (!inline_list.empty()) {
    std::string cur;
    for (char c : inline_list) {
      if (c == ',') {
        if (!cur.empty()) concepts.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur += c;
      }
    }
    if (!cur.empty()) concepts.push_back(cur);
  }
  if (!file_path.empty()) {
    std::ifstream in(file_path);
    if (!in) throw ConfigError("cannot open concepts file: " + file_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') concepts.push_back(line);
    }
  }
  if (concepts.empty()) {
    throw ConfigError("no concepts given; use --concepts or --concepts-file");
  }
  std::set<std::string> seen;
  for (const auto& c : concepts) {
    if (!seen.insert(c).second) throw ConfigError("duplicate concept: '" + c + "'");
  }
  return concepts;
}

struct MockSpec {
  bool constant = false;
  double constant_value = 0.5;
  bool synthetic = false;
  double noise_sd = 0.0;
};

MockSpec parse_mock_spec(const std::string& spec) {
  MockSpec out;
  std::string rest = spec;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string part = rest.substr(0, comma);
    rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    const std::string key = part.substr(0, eq);
    const std::string val = eq == std::string::npos ? "" : part.substr(eq + 1);
    if (key == "constant") {
      out.constant = true;
      out.constant_value = csv::parse_double(val);
    } else if (key == "synthetic") {
      out.synthetic = true;
    } else if (key == "noise_sd") {
      out.noise_sd = csv::parse_double(val);
    } else {
      throw ConfigError("unknown mock backend option: '" + key + "'");
    }
  }
  if (out.constant == out.synthetic) {
    throw ConfigError("mock backend needs exactly one of constant=<v> or synthetic");
  }
  return out;
}

// Deterministic pseudo-random ground truth in [0.35, 0.65], keyed by
// (concept, hex); usable with any library.
GroundTruthFn synthetic_ground_truth() {
  return [](const std::string& concept_name, const std::string& hex) {
    Rng rng = Rng::stream(Rng::fnv1a(concept_name), hex);
    return 0.35 + 0.3 * rng.uniform();
  };
}

std::unique_ptr<RatingBackend> make_backend(const std::string& selector,
                                            std::uint64_t seed) {
  if (selector == "http") return make_http_backend(http_config_from_env());
  if (selector.rfind("mock:", 0) == 0) {
    const MockSpec spec = parse_mock_spec(selector.substr(5));
    GroundTruthFn f = spec.constant
                          ? GroundTruthFn([v = spec.constant_value](
                                              const std::string&,
                                              const std::string&) { return v; })
                          : synthetic_ground_truth();
    return make_mock_backend(std::move(f), spec.noise_sd, seed);
  }
  throw ConfigError("unknown backend selector: '" + selector +
                    "' (use http or mock:...)");
}

void write_distribution_csv(const AssociationDistribution& dist,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write distribution CSV: " + path);
  out << "concept,library,color_index,value,n_ratings\n";
  for (Eigen::Index i = 0; i < dist.values.size(); ++i) {
    out << csv::escape(dist.concept_name) << ',' << csv::escape(dist.library_name) << ','
        << i + 1 << ',' << csv::format_double(dist.values[i]) << ','
        << dist.n_ratings_per_color << '\n';
  }
}

AssociationDistribution read_distribution_csv(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const std::vector<std::string> expected = {"concept", "library", "color_index",
                                             "value", "n_ratings"};
  if (t.header != expected) {
    throw SchemaError("distribution CSV header mismatch in " + path);
  }
  AssociationDistribution dist;
  std::vector<double> values;
  for (const auto& row : t.rows) {
    if (row.size() != expected.size()) {
      throw SchemaError("distribution CSV row arity mismatch in " + path);
    }
    dist.concept_name = row[0];
    dist.library_name = row[1];
    const int idx = std::stoi(row[2]);
    if (idx != static_cast<int>(values.size()) + 1) {
      throw SchemaError("distribution CSV color_index out of order in " + path);
    }
    values.push_back(csv::parse_double(row[3]));
    dist.n_ratings_per_color = std::stoi(row[4]);
  }
  if (values.empty()) throw SchemaError("distribution CSV has no rows: " + path);
  dist.values = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return dist;
}

struct Run {
  RunManifest manifest;
  std::vector<std::pair<std::string, Vector>> distributions;  // manifest order
};

Run read_run(const std::string& dir) {
  Run run;
  run.manifest = read_manifest((fs::path(dir) / "manifest.json").string());
  for (const std::string& concept_name : run.manifest.concepts) {
    const fs::path p =
        fs::path(dir) / "distributions" / (sanitize_filename(concept_name) + ".csv");
    const AssociationDistribution dist = read_distribution_csv(p.string());
    if (dist.concept_name != concept_name) {
      throw SchemaError("distribution file " + p.string() +
                        " does not match manifest concept '" + concept_name + "'");
    }
    run.distributions.emplace_back(concept_name, dist.values);
  }
  return run;
}

void require_same_concepts(const Run& a, const Run& b) {
  if (a.manifest.concepts == b.manifest.concepts) return;
  std::set<std::string> sa(a.manifest.concepts.begin(), a.manifest.concepts.end());
  std::set<std::string> sb(b.manifest.concepts.begin(), b.manifest.concepts.end());
  std::string only_a, only_b;
  for (const auto& c : sa) {
    if (!sb.count(c)) only_a += (only_a.empty() ? "" : ", ") + c;
  }
  for (const auto& c : sb) {
    if (!sa.count(c)) only_b += (only_b.empty() ? "" : ", ") + c;
  }
  throw ValidationError("concept sets differ between runs; only in first: [" +
                        only_a + "], only in second: [" + only_b + "]");
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// ---- estimate ---------------------------------------------------------------

struct EstimateConfig {
  std::string library_arg = "uw71";
  std::string protocol_name = "single_deterministic";
  std::string model_id = "gpt-4";
  std::optional<double> temperature;
  std::optional<int> repetitions;
  std::string backend_selector;
  std::optional<std::uint64_t> seed;
  std::string concepts_inline;
  std::string concepts_file;
  std::string out_dir;
  int parallelism = 4;
  double rate_limit = 0.0;
  double rate_burst = 4.0;
  int retries = 3;
  int retry_delay_ms = 200;
  bool resume = false;
};

int run_estimate(const EstimateConfig& cfg) {
  RatingProtocol protocol = RatingProtocol::by_name(cfg.protocol_name, cfg.model_id);
  if (cfg.temperature) protocol.temperature = *cfg.temperature;
  if (cfg.repetitions) protocol.repetitions = *cfg.repetitions;
  protocol.validate();

  if (protocol.temperature > 0.0 && !cfg.seed) {
    throw ConfigError("--seed is required when temperature > 0");
  }
  const std::uint64_t seed = cfg.seed.value_or(0);

  const std::vector<std::string> concepts =
      parse_concept_list(cfg.concepts_inline, cfg.concepts_file);
  // Build the backend before touching the output directory so configuration
  // errors leave no partial files behind.
  const auto backend = make_backend(cfg.backend_selector, seed);
  const LibrarySelector selector = parse_library_selector(cfg.library_arg);
  const ColorLibrary library = load_library(selector);

  const fs::path out(cfg.out_dir);
  const fs::path manifest_path = out / "manifest.json";
  const fs::path cache_path = out / "cache.jsonl";
  const fs::path dist_dir = out / "distributions";

  RunManifest manifest;
  std::vector<RatingRecord> cached;
  if (cfg.resume) {
    manifest = read_manifest(manifest_path.string());
    if (manifest.protocol_name != protocol.name || manifest.model_id != protocol.model_id ||
        manifest.repetitions != protocol.repetitions) {
      throw ConfigError("existing manifest does not match the requested run; "
                        "cannot resume");
    }
    cached = read_cache(cache_path.string());
    const auto remaining = resume_run(manifest, cache_path.string());
    std::cout << "resuming: " << remaining.size() << " of "
              << manifest.all_keys().size() << " ratings remain\n";
  } else {
    manifest.protocol_name = protocol.name;
    manifest.model_id = protocol.model_id;
    manifest.library_name = library.name;
    manifest.library = selector;
    manifest.concepts = concepts;
    manifest.n_colors = static_cast<int>(library.size());
    manifest.repetitions = protocol.repetitions;
    manifest.seed = seed;
    manifest.started_at = current_timestamp();
    for (const auto& c : concepts) {
      manifest.completed[c] = std::vector<std::vector<bool>>(
          library.size(), std::vector<bool>(protocol.repetitions, false));
    }
  }

  fs::create_directories(dist_dir);
  write_manifest(manifest, manifest_path.string());
  CacheWriter writer(cache_path.string());

  TokenBucket bucket(cfg.rate_limit, cfg.rate_burst);
  EstimateOptions options;
  options.retry.max_attempts = cfg.retries;
  options.retry.initial_delay = std::chrono::milliseconds(cfg.retry_delay_ms);
  options.parallelism = cfg.parallelism;
  if (cfg.rate_limit > 0.0) options.rate_limiter = &bucket;

  std::size_t total_records = 0;
  for (const std::string& concept_name : concepts) {
    options.cached.clear();
    for (const RatingRecord& rec : cached) {
      if (rec.concept_name == concept_name) options.cached.push_back(rec);
    }
    options.on_record = [&](const RatingRecord& rec) { writer.append(rec); };
    const EstimateResult result =
        estimate_distribution(protocol, concept_name, library, *backend, options);
    for (const RatingRecord& rec : result.records) {
      if (rec.parsed_value) {
        manifest.mark_completed(RatingKey{concept_name, rec.color_index, rec.repetition});
      }
    }
    total_records += result.records.size();
    write_distribution_csv(result.distribution,
                           (dist_dir / (sanitize_filename(concept_name) + ".csv")).string());
    write_manifest(manifest, manifest_path.string());
  }

  manifest.finished_at = current_timestamp();
  write_manifest(manifest, manifest_path.string());
  std::cout << "estimated " << concepts.size() << " concepts x " << library.size()
            << " colors (" << total_records << " ratings) -> " << cfg.out_dir << '\n';
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateConfig {
  std::string run_dir;
  std::string compare_dir;
  std::string human_path;
  std::string concreteness_path;
  std::string out_dir;
  int iterations = 50;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  bool learning_curve_flag = false;
  int shuffles = 10;
};

json regression_to_json(const RegressionSummary& reg) {
  json coef = json::object();
  json tstat = json::object();
  json pval = json::object();
  for (std::size_t i = 0; i < reg.names.size(); ++i) {
    coef[reg.names[i]] = reg.coefficients[static_cast<Eigen::Index>(i)];
    tstat[reg.names[i]] = reg.t_statistics[static_cast<Eigen::Index>(i)];
    pval[reg.names[i]] = reg.p_values[static_cast<Eigen::Index>(i)];
  }
  return json{{"predictors", reg.names},
              {"coefficients", coef},
              {"t_statistics", tstat},
              {"p_values", pval},
              {"r_squared", reg.r_squared}};
}

void write_evaluation_csv(const std::vector<ConceptEvaluation>& evals,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write evaluation CSV: " + path);
  out << "concept,pearson_r,significant,split_half_r,specificity,concreteness\n";
  for (const auto& ev : evals) {
    out << csv::escape(ev.concept_name) << ',' << csv::format_double(ev.pearson_r) << ','
        << (ev.significant ? "true" : "false") << ','
        << csv::format_double(ev.split_half_r) << ','
        << csv::format_double(ev.specificity) << ','
        << (ev.concreteness ? csv::format_double(*ev.concreteness) : std::string())
        << '\n';
  }
}

int run_evaluate(const EvaluateConfig& cfg) {
  if (!cfg.seed) throw ConfigError("--seed is required (split-half draws are random)");
  const Run run = read_run(cfg.run_dir);
  const HumanLoadReport human = [&] {
    const LibrarySelector sel = run.manifest.library;
    return load_human_ratings(cfg.human_path, load_library(sel));
  }();
  warn(human.warnings);

  std::function<std::optional<double>(const std::string&)> concreteness;
  ConcretenessLoadReport concreteness_report;
  if (!cfg.concreteness_path.empty()) {
    concreteness_report = load_concreteness(cfg.concreteness_path);
    warn(concreteness_report.warnings);
    concreteness = [&](const std::string& w) {
      return concreteness_report.norms.lookup(w);
    };
  }

  EvaluationOptions opts;
  opts.alpha = cfg.alpha;
  opts.split_half_iterations = cfg.iterations;
  opts.seed = *cfg.seed;
  const std::vector<ConceptEvaluation> evals =
      evaluate_concepts(run.distributions, human.sets, concreteness, opts);

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  write_evaluation_csv(evals, (out / "evaluation.csv").string());

  // Optional second run: paired t test over per-concept correlations.
  std::optional<std::vector<ConceptEvaluation>> compare_evals;
  if (!cfg.compare_dir.empty()) {
    const Run other = read_run(cfg.compare_dir);
    require_same_concepts(run, other);
    compare_evals = evaluate_concepts(other.distributions, human.sets, concreteness, opts);
    Vector ra(evals.size()), rb(evals.size());
    for (std::size_t i = 0; i < evals.size(); ++i) {
      ra[static_cast<Eigen::Index>(i)] = evals[i].pearson_r;
      rb[static_cast<Eigen::Index>(i)] = (*compare_evals)[i].pearson_r;
    }
    const PairedTResult tt = paired_t_test(ra, rb);
    const json j{{"run_a", cfg.run_dir},     {"run_b", cfg.compare_dir},
                 {"n_concepts", evals.size()}, {"mean_r_a", ra.mean()},
                 {"mean_r_b", rb.mean()},     {"mean_diff", tt.mean_diff},
                 {"t", tt.t},                 {"df", tt.df},
                 {"p", tt.p}};
    std::ofstream f(out / "paired_t.json");
    f << j.dump(2) << '\n';
  }

  // Correlation chart + its underlying data.
  {
    std::vector<std::string> labels;
    std::vector<double> r_run, baselines;
    for (const auto& ev : evals) {
      labels.push_back(ev.concept_name);
      r_run.push_back(ev.pearson_r);
      baselines.push_back(ev.split_half_r);
    }
    std::vector<std::vector<double>> series{r_run};
    std::vector<std::string> fills{"#B0B0B0"};
    if (compare_evals) {
      std::vector<double> r_cmp;
      for (const auto& ev : *compare_evals) r_cmp.push_back(ev.pearson_r);
      series.push_back(std::move(r_cmp));
      fills.push_back("#606060");
    }
    svg::ChartOptions co;
    co.width = std::max(960, static_cast<int>(labels.size()) * 14 + 80);
    co.height = 360;
    double lo = 0.0;
    for (const auto& s : series) {
      for (double v : s) lo = std::min(lo, v);
    }
    co.y_min = std::floor(lo * 4.0) / 4.0;
    co.y_max = 1.0;
    co.title = "per-concept correlation with human ratings";
    co.y_label = "pearson r";
    std::ofstream f(out / "correlations.svg");
    f << svg::grouped_bar_chart(labels, series, fills, baselines, co);

    std::ofstream d(out / "correlations.csv");
    d << "concept,pearson_r" << (compare_evals ? ",pearson_r_compare" : "")
      << ",split_half_r\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      d << csv::escape(labels[i]) << ',' << csv::format_double(r_run[i]);
      if (compare_evals) {
        d << ',' << csv::format_double((*compare_evals)[i].pearson_r);
      }
      d << ',' << csv::format_double(baselines[i]) << '\n';
    }
  }

  // Multiple regression of correlations on specificity + concreteness.
  if (concreteness) {
    std::vector<double> r, spec, conc;
    int dropped = 0;
    for (const auto& ev : evals) {
      if (!ev.concreteness) {
        ++dropped;
        continue;
      }
      r.push_back(ev.pearson_r);
      spec.push_back(ev.specificity);
      conc.push_back(*ev.concreteness);
    }
    if (dropped > 0) {
      std::cerr << "warning: " << dropped
                << " concept(s) lack concreteness norms; excluded from regression\n";
    }
    if (r.size() >= 4) {
      const auto to_vec = [](const std::vector<double>& v) {
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
      };
      const RegressionSummary reg =
          regress({"specificity", "concreteness"}, {to_vec(spec), to_vec(conc)},
                  to_vec(r));
      std::ofstream f(out / "regression.json");
      f << regression_to_json(reg).dump(2) << '\n';
    } else {
      std::cerr << "warning: too few concepts with concreteness norms for the "
                   "regression\n";
    }
  }

  // Correlation as a function of ratings averaged, from the cached records.
  if (cfg.learning_curve_flag) {
    if (run.manifest.repetitions < 2) {
      throw ConfigError("--learning-curve needs a run with repetitions >= 2");
    }
    const auto cache = read_cache((fs::path(cfg.run_dir) / "cache.jsonl").string());
    std::ofstream f(out / "learning_curve.csv");
    f << "concept,k,pearson_r\n";
    for (const auto& [concept_name, values] : run.distributions) {
      std::vector<RatingRecord> records;
      for (const auto& rec : cache) {
        if (rec.concept_name == concept_name) records.push_back(rec);
      }
      const Matrix reps = repetition_matrix(records, static_cast<int>(values.size()),
                                            run.manifest.repetitions);
      const Vector human_mean = human.sets.at(concept_name).mean_per_color();
      const auto curve = learning_curve(reps, human_mean, run.manifest.repetitions,
                                        *cfg.seed, cfg.shuffles);
      for (std::size_t k = 0; k < curve.size(); ++k) {
        f << csv::escape(concept_name) << ',' << k + 1 << ','
          << csv::format_double(curve[k]) << '\n';
      }
    }
  }

  double mean_r = 0.0, mean_split = 0.0;
  int n_sig = 0;
  for (const auto& ev : evals) {
    mean_r += ev.pearson_r;
    mean_split += ev.split_half_r;
    n_sig += ev.significant ? 1 : 0;
  }
  mean_r /= static_cast<double>(evals.size());
  mean_split /= static_cast<double>(evals.size());
  std::printf("evaluated %zu concepts: mean r = %.3f, significant for %d, "
              "mean split-half r = %.3f\n",
              evals.size(), mean_r, n_sig, mean_split);
  return 0;
}

// ---- specificity ------------------------------------------------------------

struct SpecificityConfig {
  std::string run_dir;
  std::string evaluation_path;
  std::string concreteness_path;
  std::string out_dir;
};

int run_specificity(const SpecificityConfig& cfg) {
  const Run run = read_run(cfg.run_dir);
  std::vector<Vector> dists;
  for (const auto& [concept_name, values] : run.distributions) dists.push_back(values);
  const CohortSpecificity spec = cohort_specificity(dists);

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  {
    std::ofstream f(out / "specificity.csv");
    f << "concept,entropy,entropy_norm,specificity\n";
    for (std::size_t i = 0; i < run.distributions.size(); ++i) {
      f << csv::escape(run.distributions[i].first) << ','
        << csv::format_double(spec.entropy[i]) << ','
        << csv::format_double(spec.entropy_norm[i]) << ','
        << csv::format_double(spec.specificity[i]) << '\n';
    }
  }

  if (!cfg.evaluation_path.empty() && !cfg.concreteness_path.empty()) {
    const csv::Table t = csv::read_file(cfg.evaluation_path);
    const auto idx = [&](const char* name) {
      const auto it = std::find(t.header.begin(), t.header.end(), name);
      if (it == t.header.end()) {
        throw SchemaError(std::string("evaluation CSV lacks column ") + name);
      }
      return static_cast<int>(it - t.header.begin());
    };
    const int c_concept = idx("concept");
    const int c_r = idx("pearson_r");
    const int c_spec = idx("specificity");
    const ConcretenessLoadReport norms = load_concreteness(cfg.concreteness_path);
    warn(norms.warnings);
    std::vector<double> r, sp, conc;
    for (const auto& row : t.rows) {
      const auto c = norms.norms.lookup(row[c_concept]);
      if (!c) continue;
      r.push_back(csv::parse_double(row[c_r]));
      sp.push_back(csv::parse_double(row[c_spec]));
      conc.push_back(*c);
    }
    if (r.size() >= 4) {
      const auto to_vec = [](const std::vector<double>& v) {
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
      };
      const RegressionSummary reg = regress(
          {"specificity", "concreteness"}, {to_vec(sp), to_vec(conc)}, to_vec(r));
      std::ofstream f(out / "regression.json");
      f << regression_to_json(reg).dump(2) << '\n';
    } else {
      std::cerr << "warning: too few evaluation rows with concreteness norms\n";
    }
  }
  std::cout << "specificity written for " << run.distributions.size()
            << " concepts -> " << cfg.out_dir << '\n';
  return 0;
}

// ---- fit-colorspace ---------------------------------------------------------

struct FitConfig {
  std::string run_dir;
  std::string out_dir;
};

int run_fit_colorspace(const FitConfig& cfg) {
  const Run run = read_run(cfg.run_dir);
  const ColorLibrary library = load_library(run.manifest.library);
  const ColorimetricDesign design = build_design(library);

  std::vector<ColorimetricFit> fits;
  for (const auto& [concept_name, values] : run.distributions) {
    fits.push_back(fit_concept(design, concept_name, values));
  }

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  write_fits_csv(fits, (out / "fits.csv").string());
  {
    std::ofstream f(out / "predictions.csv");
    f << "concept,color_index,predicted\n";
    for (const auto& fit : fits) {
      const Vector pred = predict(fit, design);
      for (Eigen::Index i = 0; i < pred.size(); ++i) {
        f << csv::escape(fit.concept_name) << ',' << i + 1 << ','
          << csv::format_double(pred[i]) << '\n';
      }
    }
  }
  std::cout << "fit " << fits.size() << " concepts -> " << cfg.out_dir << '\n';
  return 0;
}

// ---- report -----------------------------------------------------------------

struct ReportConfig {
  std::string run_dir;
  std::string evaluation_path;
  std::string out_dir;
};

int run_report(const ReportConfig& cfg) {
  const Run run = read_run(cfg.run_dir);
  const ColorLibrary library = load_library(run.manifest.library);

  fs::create_directories(fs::path(cfg.out_dir) / "charts");
  const fs::path out(cfg.out_dir);

  std::vector<std::string> fills;
  for (const ColorSpec& c : library.colors) fills.push_back(c.hex);

  for (const auto& [concept_name, values] : run.distributions) {
    svg::ChartOptions co;
    co.width = std::max(720, static_cast<int>(library.size()) * 12 + 80);
    co.height = 280;
    co.y_min = 0.0;
    co.y_max = 1.0;
    co.title = concept_name;
    co.y_label = "association";
    std::vector<double> vals(values.data(), values.data() + values.size());
    const std::string name = sanitize_filename(concept_name);
    std::ofstream f(out / "charts" / (name + ".svg"));
    f << svg::bar_chart(vals, fills, co);
    std::ofstream d(out / "charts" / (name + ".csv"));
    d << "color_index,hex,value\n";
    for (std::size_t i = 0; i < vals.size(); ++i) {
      d << i + 1 << ',' << library.colors[i].hex << ','
        << csv::format_double(vals[i]) << '\n';
    }
  }

  if (!cfg.evaluation_path.empty()) {
    const csv::Table t = csv::read_file(cfg.evaluation_path);
    const auto idx = [&](const char* name) {
      const auto it = std::find(t.header.begin(), t.header.end(), name);
      if (it == t.header.end()) {
        throw SchemaError(std::string("evaluation CSV lacks column ") + name);
      }
      return static_cast<int>(it - t.header.begin());
    };
    const int c_concept = idx("concept");
    const int c_r = idx("pearson_r");
    const int c_spec = idx("specificity");
    std::vector<double> xs, ys;
    std::ofstream d(out / "specificity_vs_correlation.csv");
    d << "concept,specificity,pearson_r\n";
    for (const auto& row : t.rows) {
      xs.push_back(csv::parse_double(row[c_spec]));
      ys.push_back(csv::parse_double(row[c_r]));
      d << csv::escape(row[c_concept]) << ',' << row[c_spec] << ',' << row[c_r]
        << '\n';
    }
    svg::ChartOptions co;
    co.title = "specificity vs correlation";
    co.y_label = "pearson r";
    co.y_min = -0.25;
    co.y_max = 1.0;
    std::ofstream f(out / "specificity_vs_correlation.svg");
    f << svg::scatter(xs, ys, co);
  }
  std::cout << "report written -> " << cfg.out_dir << '\n';
  return 0;
}

// ---- export-library ---------------------------------------------------------

int run_export_library(const std::string& library_arg, const std::string& out_path) {
  const ColorLibrary lib = load_library(parse_library_selector(library_arg));
  write_library_csv(lib, out_path);
  std::cout << "wrote " << lib.size() << " colors -> " << out_path << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"color-concept association estimation and evaluation"};
  app.require_subcommand(1);

  EstimateConfig est;
  auto* cmd_est = app.add_subcommand("estimate",
                                     "rate concepts against a color library");
  cmd_est->add_option("--library", est.library_arg, "uw71 or a library CSV path");
  cmd_est->add_option("--protocol", est.protocol_name,
                      "single_deterministic | anchored_deterministic | "
                      "stochastic_averaged");
  cmd_est->add_option("--model", est.model_id, "model identifier");
  cmd_est->add_option("--temperature", est.temperature, "override temperature");
  cmd_est->add_option("--repetitions", est.repetitions, "override repetitions");
  cmd_est->add_option("--backend", est.backend_selector,
                      "http or mock:constant=<v>|mock:synthetic[,noise_sd=<v>]")
      ->required();
  cmd_est->add_option("--seed", est.seed, "RNG seed (required when temperature > 0)");
  cmd_est->add_option("--concepts", est.concepts_inline, "comma-separated concepts");
  cmd_est->add_option("--concepts-file", est.concepts_file, "file with one concept per line");
  cmd_est->add_option("--out", est.out_dir, "output directory")->required();
  cmd_est->add_option("--parallelism", est.parallelism, "max in-flight requests");
  cmd_est->add_option("--rate-limit", est.rate_limit, "requests per second (0 = off)");
  cmd_est->add_option("--rate-burst", est.rate_burst, "token bucket burst size");
  cmd_est->add_option("--retries", est.retries, "attempts per rating");
  cmd_est->add_option("--retry-delay-ms", est.retry_delay_ms, "initial backoff delay");
  cmd_est->add_flag("--resume", est.resume, "continue an interrupted run");

  EvaluateConfig ev;
  auto* cmd_ev = app.add_subcommand("evaluate",
                                    "compare a run's distributions with human ratings");
  cmd_ev->add_option("--run", ev.run_dir, "estimate output directory")->required();
  cmd_ev->add_option("--compare", ev.compare_dir, "second run for a paired t test");
  cmd_ev->add_option("--human", ev.human_path, "human ratings CSV")->required();
  cmd_ev->add_option("--concreteness", ev.concreteness_path, "concreteness norms CSV");
  cmd_ev->add_option("--out", ev.out_dir, "output directory")->required();
  cmd_ev->add_option("--iterations", ev.iterations, "split-half iterations");
  cmd_ev->add_option("--alpha", ev.alpha, "family-wise significance level");
  cmd_ev->add_option("--seed", ev.seed, "RNG seed for split-half draws");
  cmd_ev->add_flag("--learning-curve", ev.learning_curve_flag,
                   "emit correlation vs number of ratings (needs repetitions >= 2)");
  cmd_ev->add_option("--shuffles", ev.shuffles, "learning-curve repetition shuffles");

  SpecificityConfig sp;
  auto* cmd_sp = app.add_subcommand("specificity",
                                    "distribution peakiness for a run's concepts");
  cmd_sp->add_option("--run", sp.run_dir, "estimate output directory")->required();
  cmd_sp->add_option("--evaluation", sp.evaluation_path,
                     "evaluation.csv for the specificity/concreteness regression");
  cmd_sp->add_option("--concreteness", sp.concreteness_path, "concreteness norms CSV");
  cmd_sp->add_option("--out", sp.out_dir, "output directory")->required();

  FitConfig fit;
  auto* cmd_fit = app.add_subcommand("fit-colorspace",
                                     "per-concept colorimetric regression fits");
  cmd_fit->add_option("--run", fit.run_dir, "estimate output directory")->required();
  cmd_fit->add_option("--out", fit.out_dir, "output directory")->required();

  ReportConfig rep;
  auto* cmd_rep = app.add_subcommand("report", "distribution bar charts as SVG + CSV");
  cmd_rep->add_option("--run", rep.run_dir, "estimate output directory")->required();
  cmd_rep->add_option("--evaluation", rep.evaluation_path,
                      "evaluation.csv for the specificity scatter");
  cmd_rep->add_option("--out", rep.out_dir, "output directory")->required();

  std::string exp_library = "uw71";
  std::string exp_out;
  auto* cmd_exp = app.add_subcommand("export-library", "write a library as CSV");
  cmd_exp->add_option("--library", exp_library, "uw71 or a library CSV path");
  cmd_exp->add_option("--out", exp_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_ev->parsed()) return run_evaluate(ev);
    if (cmd_sp->parsed()) return run_specificity(sp);
    if (cmd_fit->parsed()) return run_fit_colorspace(fit);
    if (cmd_rep->parsed()) return run_report(rep);
    if (cmd_exp->parsed()) return run_export_library(exp_library, exp_out);
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "ConfigError"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << json{{"error", "SchemaError"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << json{{"error", "ValidationError"}, {"message", e.what()}}.dump()
              << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << json{{"error", "Error"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump()
              << '\n';
    return 1;
  }
  return 0;
}

}  // namespace chroma::cli
