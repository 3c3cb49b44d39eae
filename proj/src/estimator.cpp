#include "chroma/estimator.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "chroma/error.hpp"
#include "chroma/rng.hpp"

namespace chroma {

namespace {

constexpr const char* kSystemPrompt = "You are an expert on color-concept associations.";

constexpr const char* kTaskDescription =
    "I will give you the hexcode for a color and a concept word. Rate on a "
    "continuous scale from 0 to 1, using 3 decimal places, how associated the "
    "color is with the concept.";

constexpr const char* kTrialStart = "Let's do the rating task —";

constexpr const char* kAnswerLine = "Answer with only the number:";

std::string quoted(const std::string& s) { return "'" + s + "'"; }

}  // namespace

RatingProtocol RatingProtocol::single_deterministic(const std::string& model_id) {
  return RatingProtocol{"single_deterministic", 0.0, 1, false, kSystemPrompt,
                        model_id};
}

RatingProtocol RatingProtocol::anchored_deterministic(const std::string& model_id) {
  return RatingProtocol{"anchored_deterministic", 0.0, 1, true, kSystemPrompt,
                        model_id};
}

RatingProtocol RatingProtocol::stochastic_averaged(const std::string& model_id,
                                                   int repetitions) {
  return RatingProtocol{"stochastic_averaged", 1.0, repetitions, false,
                        kSystemPrompt, model_id};
}

RatingProtocol RatingProtocol::by_name(const std::string& name,
                                       const std::string& model_id) {
  if (name == "single_deterministic") return single_deterministic(model_id);
  if (name == "anchored_deterministic") return anchored_deterministic(model_id);
  if (name == "stochastic_averaged") return stochastic_averaged(model_id);
  throw ValidationError("unknown protocol: '" + name + "'");
}

void RatingProtocol::validate() const {
  if (repetitions < 1) throw ValidationError("protocol repetitions must be >= 1");
  if (temperature < 0.0) throw ValidationError("protocol temperature must be >= 0");
  if (name == "single_deterministic") {
    if (temperature != 0.0 || repetitions != 1 || anchoring) {
      throw ValidationError(
          "single_deterministic requires temperature 0, 1 repetition, no anchoring");
    }
  } else if (name == "anchored_deterministic") {
    if (temperature != 0.0 || repetitions != 1 || !anchoring) {
      throw ValidationError(
          "anchored_deterministic requires temperature 0, 1 repetition, anchoring");
    }
  } else if (name == "stochastic_averaged") {
    if (anchoring) {
      throw ValidationError("stochastic_averaged does not use anchoring");
    }
  } else {
    throw ValidationError("unknown protocol: '" + name + "'");
  }
}

Prompt build_prompt(const RatingProtocol& protocol, const std::string& concept_name,
                    const std::string& hex, const ColorLibrary& library) {
  if (concept_name.empty()) throw ValidationError("build_prompt: empty concept");
  if (!is_well_formed_hex(hex)) {
    throw ValidationError("build_prompt: malformed hex '" + hex + "'");
  }

  std::string user = kTaskDescription;
  user += '\n';
  if (protocol.anchoring) {
    std::string all_hexcodes;
    for (std::size_t i = 0; i < library.colors.size(); ++i) {
      if (i) all_hexcodes += ", ";
      all_hexcodes += library.colors[i].hex;
    }
    user += "The concept is " + quoted(concept_name) + ".\n";
    user += "Before rating, here's the set of all the colors " + all_hexcodes + ".\n";
    user += "Think of which color you associate most with '" + concept_name +
            ".' That color should get a rating of 1.\n";
    user += "Now think of which color you associated least with '" + concept_name +
            ".' That color should get a rating of 0.\n";
    user += "Now let's do the rating task.\n";
  }
  user += kTrialStart;
  user += '\n';
  user += "Concept: " + quoted(concept_name) + "\n";
  user += "Color: " + hex + "\n";
  user += kAnswerLine;

  return Prompt{protocol.system_prompt.empty() ? kSystemPrompt : protocol.system_prompt,
                user};
}

double parse_rating(const std::string& raw) {
  const char* s = raw.c_str();
  const char* tok = nullptr;
  for (const char* p = s; *p; ++p) {
    const bool digit = *p >= '0' && *p <= '9';
    const bool dot_digit = *p == '.' && p[1] >= '0' && p[1] <= '9';
    if (digit || dot_digit) {
      tok = p;
      if (p > s && (p[-1] == '-' || p[-1] == '+')) tok = p - 1;
      break;
    }
  }
  if (!tok) throw RatingParseError("no numeric token in response: '" + raw + "'");
  char* end = nullptr;
  const double v = std::strtod(tok, &end);
  if (end == tok) throw RatingParseError("no numeric token in response: '" + raw + "'");
  if (v < 0.0 || v > 1.0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "rating %g outside [0, 1]", v);
    throw RatingParseError(buf);
  }
  return v;
}

namespace {

class MockBackend : public RatingBackend {
 public:
  MockBackend(GroundTruthFn ground_truth, double noise_sd, std::uint64_t seed)
      : ground_truth_(std::move(ground_truth)), noise_sd_(noise_sd), seed_(seed) {}

  BackendCapabilities capabilities() const override { return {true, true}; }

  std::string complete(const std::string& /*model_id*/, double temperature,
                       const std::string& /*system_prompt*/,
                       const std::string& user_prompt) override {
    const auto [concept_name, hex] = parse_prompt(user_prompt);

    std::uint64_t call_no = 0;
    {
      std::lock_guard lock(mu_);
      call_no = calls_[{concept_name, hex}]++;
    }

    double value = ground_truth_(concept_name, hex);
    const double sd = noise_sd_ * temperature;
    if (sd > 0.0) {
      Rng rng = Rng::stream(seed_, concept_name + "|" + hex + "|" + std::to_string(call_no));
      value += rng.gaussian() * sd;
    }
    value = std::min(1.0, std::max(0.0, value));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", value);
    return buf;
  }

 private:
  // Recovers (concept, hex) from the rating block and checks the template
  // skeleton, so drift in build_prompt shows up as a hard failure here.
  static std::pair<std::string, std::string> parse_prompt(const std::string& user) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= user.size()) {
      std::size_t end = user.find('\n', pos);
      if (end == std::string::npos) end = user.size();
      lines.push_back(user.substr(pos, end - pos));
      pos = end + 1;
    }
    if (lines.size() < 4 || lines.front() != kTaskDescription ||
        lines.back() != kAnswerLine) {
      throw ProtocolViolationError("mock backend: unexpected prompt shape");
    }
    bool has_trial_start = false;
    for (const auto& l : lines) has_trial_start |= l == kTrialStart;
    if (!has_trial_start) {
      throw ProtocolViolationError("mock backend: missing rating-task line");
    }
    const std::string& concept_line = lines[lines.size() - 3];
    const std::string& color_line = lines[lines.size() - 2];
    if (concept_line.size() < 11 || concept_line.rfind("Concept: '", 0) != 0 ||
        concept_line.back() != '\'') {
      throw ProtocolViolationError("mock backend: malformed concept line");
    }
    if (color_line.rfind("Color: ", 0) != 0) {
      throw ProtocolViolationError("mock backend: malformed color line");
    }
    std::string concept_name = concept_line.substr(10, concept_line.size() - 11);
    std::string hex = color_line.substr(7);
    if (!is_well_formed_hex(hex)) {
      throw ProtocolViolationError("mock backend: malformed hex in prompt");
    }
    return {std::move(concept_name), std::move(hex)};
  }

  GroundTruthFn ground_truth_;
  double noise_sd_;
  std::uint64_t seed_;
  std::mutex mu_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> calls_;
};

}  // namespace

std::unique_ptr<RatingBackend> make_mock_backend(GroundTruthFn ground_truth,
                                                 double noise_sd,
                                                 std::uint64_t seed) {
  return std::make_unique<MockBackend>(std::move(ground_truth), noise_sd, seed);
}

std::string current_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("CHROMA_ASSOC_EPOCH")) {
    t = static_cast<std::time_t>(std::atoll(epoch));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

struct TaskState {
  std::vector<std::optional<RatingRecord>> slots;
  std::vector<bool> emitted;
  std::size_t frontier = 0;  // first color whose records are not yet flushed
};

}  // namespace

EstimateResult estimate_distribution(const RatingProtocol& protocol,
                                     const std::string& concept_name,
                                     const ColorLibrary& library,
                                     RatingBackend& backend,
                                     const EstimateOptions& options) {
  protocol.validate();
  if (concept_name.empty()) throw ValidationError("estimate_distribution: empty concept");
  if (library.colors.empty()) {
    throw ValidationError("estimate_distribution: empty library");
  }

  const int n = static_cast<int>(library.colors.size());
  const int reps = protocol.repetitions;
  const auto slot_of = [reps](int color, int rep) {
    return static_cast<std::size_t>(color) * reps + rep;
  };

  TaskState st;
  st.slots.resize(static_cast<std::size_t>(n) * reps);
  st.emitted.assign(st.slots.size(), false);

  for (const RatingRecord& rec : options.cached) {
    if (rec.concept_name != concept_name || rec.protocol_name != protocol.name ||
        rec.model_id != protocol.model_id || !rec.parsed_value) {
      continue;
    }
    if (rec.color_index < 1 || rec.color_index > n || rec.repetition < 0 ||
        rec.repetition >= reps) {
      continue;
    }
    const std::size_t s = slot_of(rec.color_index - 1, rec.repetition);
    st.slots[s] = rec;
    st.emitted[s] = true;  // already persisted by the run that cached it
  }

  // One task per color; a color's repetitions run sequentially so that a
  // backend sees them arrive in repetition order regardless of scheduling.
  std::vector<int> tasks;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < reps; ++r) {
      if (!st.slots[slot_of(c, r)]) {
        tasks.push_back(c);
        break;
      }
    }
  }

  const auto clock = options.clock ? options.clock : current_timestamp;

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;

  const auto flush_through = [&](std::size_t limit_color) {
    // caller holds mu
    while (st.frontier < static_cast<std::size_t>(n) && st.frontier < limit_color) {
      bool complete = true;
      for (int r = 0; r < reps && complete; ++r) {
        complete = st.slots[slot_of(static_cast<int>(st.frontier), r)].has_value();
      }
      if (!complete) break;
      for (int r = 0; r < reps; ++r) {
        const std::size_t s = slot_of(static_cast<int>(st.frontier), r);
        if (!st.emitted[s]) {
          if (options.on_record) options.on_record(*st.slots[s]);
          st.emitted[s] = true;
        }
      }
      ++st.frontier;
    }
  };

  const auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size() || abort.load()) return;
      const int color = tasks[t];
      const ColorSpec& spec = library.colors[color];

      std::vector<std::pair<std::size_t, RatingRecord>> done;
      try {
        const Prompt prompt = build_prompt(protocol, concept_name, spec.hex, library);
        for (int rep = 0; rep < reps; ++rep) {
          const std::size_t slot = slot_of(color, rep);
          if (st.slots[slot]) continue;  // filled from the cache
          RatingRecord rec;
          rec.concept_name = concept_name;
          rec.color_index = spec.index;
          rec.repetition = rep;
          rec.hex = spec.hex;
          rec.protocol_name = protocol.name;
          rec.model_id = protocol.model_id;
          for (int attempt = 1; attempt <= options.retry.max_attempts; ++attempt) {
            rec.attempts = attempt;
            const auto delay = options.retry.delay_before(attempt);
            if (delay.count() > 0) std::this_thread::sleep_for(delay);
            if (options.rate_limiter) options.rate_limiter->acquire();
            try {
              rec.raw_response = backend.complete(protocol.model_id,
                                                  protocol.temperature, prompt.system,
                                                  prompt.user);
            } catch (const TransportError& e) {
              rec.raw_response = std::string("<transport error: ") + e.what() + ">";
              if (!e.retryable()) break;
              continue;
            }
            try {
              rec.parsed_value = parse_rating(rec.raw_response);
              break;
            } catch (const RatingParseError&) {
              // re-ask within the retry budget
            }
          }
          rec.timestamp = clock();
          done.emplace_back(slot, std::move(rec));
        }
      } catch (...) {
        abort.store(true);
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }

      std::lock_guard lock(mu);
      for (auto& [slot, rec] : done) st.slots[slot] = std::move(rec);
      flush_through(static_cast<std::size_t>(n));
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(options.parallelism, static_cast<int>(tasks.size())));
  if (tasks.empty()) {
    // nothing to do; all slots were cached
  } else if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  {
    // Flush stragglers (completed colors beyond a gap, or after an abort).
    std::lock_guard lock(mu);
    for (std::size_t s = 0; s < st.slots.size(); ++s) {
      if (st.slots[s] && !st.emitted[s]) {
        if (options.on_record) options.on_record(*st.slots[s]);
        st.emitted[s] = true;
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  EstimateResult result;
  result.distribution.concept_name = concept_name;
  result.distribution.library_name = library.name;
  result.distribution.n_ratings_per_color = reps;
  result.distribution.values.resize(n);
  std::string failed_colors;
  for (int c = 0; c < n; ++c) {
    double sum = 0.0;
    int ok = 0;
    for (int r = 0; r < reps; ++r) {
      const auto& rec = st.slots[slot_of(c, r)];
      result.records.push_back(*rec);
      if (rec->parsed_value) {
        sum += *rec->parsed_value;
        ++ok;
      }
    }
    if (ok == 0) {
      if (!failed_colors.empty()) failed_colors += ", ";
      failed_colors += std::to_string(library.colors[c].index);
      result.distribution.values[c] = 0.0;
    } else {
      result.distribution.values[c] = sum / ok;
    }
  }
  if (!failed_colors.empty()) {
    throw IncompleteDistributionError(
        "no successfully parsed rating for concept '" + concept_name +
        "', color index(es) " + failed_colors);
  }
  return result;
}

Matrix repetition_matrix(const std::vector<RatingRecord>& records, int n_colors,
                         int repetitions) {
  Matrix m = Matrix::Constant(n_colors, repetitions,
                              std::numeric_limits<double>::quiet_NaN());
  for (const RatingRecord& rec : records) {
    if (rec.color_index < 1 || rec.color_index > n_colors || rec.repetition < 0 ||
        rec.repetition >= repetitions) {
      throw ValidationError("repetition_matrix: record outside the expected grid");
    }
    if (!rec.parsed_value) {
      throw ValidationError("repetition_matrix: unparsed record present");
    }
    m(rec.color_index - 1, rec.repetition) = *rec.parsed_value;
  }
  if (m.hasNaN()) {
    throw ValidationError("repetition_matrix: missing (color, repetition) entries");
  }
  return m;
}

}  // namespace chroma
