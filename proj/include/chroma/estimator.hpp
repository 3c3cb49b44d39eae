#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chroma/colorlib.hpp"
#include "chroma/retry.hpp"
#include "chroma/types.hpp"

namespace chroma {

// A fully resolved prompting configuration.
struct RatingProtocol {
  std::string name;
  double temperature = 0.0;
  int repetitions = 1;
  bool anchoring = false;
  std::string system_prompt;
  std::string model_id;

  static RatingProtocol single_deterministic(const std::string& model_id = "gpt-4");
  static RatingProtocol anchored_deterministic(const std::string& model_id = "gpt-4");
  static RatingProtocol stochastic_averaged(const std::string& model_id = "gpt-4",
                                            int repetitions = 10);
  static RatingProtocol by_name(const std::string& name,
                                const std::string& model_id = "gpt-4");

  // Enforces the per-name invariants (temperature, repetitions, anchoring).
  void validate() const;
};

// One backend response, successful or not.
struct RatingRecord {
  std::string concept_name;
  int color_index = 0;  // 1-based
  int repetition = 0;   // 0-based
  std::string hex;
  std::string raw_response;
  std::optional<double> parsed_value;
  int attempts = 0;
  std::string protocol_name;
  std::string model_id;
  std::string timestamp;  // ISO-8601 UTC
};

// A concept's rating for every color of a library, in library-index order.
struct AssociationDistribution {
  std::string concept_name;
  std::string library_name;
  Vector values;
  int n_ratings_per_color = 0;
};

struct BackendCapabilities {
  bool supports_temperature = true;
  bool deterministic_at_zero = false;
};

// Chat-completion abstraction. Implementations must tolerate concurrent
// calls to complete().
class RatingBackend {
 public:
  virtual ~RatingBackend() = default;
  virtual BackendCapabilities capabilities() const = 0;
  virtual std::string complete(const std::string& model_id, double temperature,
                               const std::string& system_prompt,
                               const std::string& user_prompt) = 0;
};

struct Prompt {
  std::string system;
  std::string user;
};

// Renders the system/user prompt pair for one rating trial. The anchoring
// preamble lists every library hexcode, comma-separated, in index order.
// Throws ValidationError on an empty concept or malformed hex.
Prompt build_prompt(const RatingProtocol& protocol, const std::string& concept_name,
                    const std::string& hex, const ColorLibrary& library);

// Extracts the first decimal number token from a raw response. Accepts "0",
// "1", "0.835", leading/trailing whitespace and a trailing period. A first
// token outside [0, 1] is a RatingParseError, not clamped.
double parse_rating(const std::string& raw);

using GroundTruthFn =
    std::function<double(const std::string& concept_name, const std::string& hex)>;

// Offline backend: parses concept and hex back out of the prompt (throwing
// ProtocolViolationError if the template is malformed), evaluates the ground
// truth, adds seeded Gaussian noise scaled by noise_sd * temperature, clamps
// to [0, 1] and renders with 3 decimals. Responses are keyed by
// (concept, hex, call#) so concurrent call order never changes the results.
std::unique_ptr<RatingBackend> make_mock_backend(GroundTruthFn ground_truth,
                                                 double noise_sd,
                                                 std::uint64_t seed);

struct EstimateOptions {
  RetryPolicy retry;
  int parallelism = 4;
  TokenBucket* rate_limiter = nullptr;              // optional, not owned
  std::function<void(const RatingRecord&)> on_record;  // called in key order
  std::vector<RatingRecord> cached;                 // prior records to reuse
  std::function<std::string()> clock;               // timestamp source
};

struct EstimateResult {
  AssociationDistribution distribution;
  std::vector<RatingRecord> records;  // (color, repetition) order
};

// Rates every library color `repetitions` times and averages the parsed
// values per color. All records (including failures) are emitted through
// on_record before IncompleteDistributionError is raised for colors whose
// every repetition failed.
EstimateResult estimate_distribution(const RatingProtocol& protocol,
                                     const std::string& concept_name,
                                     const ColorLibrary& library,
                                     RatingBackend& backend,
                                     const EstimateOptions& options = {});

// colors x repetitions matrix of parsed values from one concept's records.
// Missing entries are an error.
Matrix repetition_matrix(const std::vector<RatingRecord>& records, int n_colors,
                         int repetitions);

// ISO-8601 UTC timestamp; honors the CHROMA_ASSOC_EPOCH environment variable
// (fixed unix seconds) for reproducible runs.
std::string current_timestamp();

}  // namespace chroma
