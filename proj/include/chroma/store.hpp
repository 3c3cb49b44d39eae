#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chroma/colorlib.hpp"
#include "chroma/estimator.hpp"
#include "chroma/metrics.hpp"

namespace chroma {

// ---- human rating ingestion -------------------------------------------------

struct HumanLoadReport {
  std::map<std::string, HumanRatingSet> sets;
  std::vector<std::string> warnings;  // unknown columns, rejected participants
};

// Loads a CSV with header participant_id,concept,color_index,rating.
// Participants with incomplete color coverage for a concept are rejected and
// reported; out-of-range ratings and color indices are hard errors.
HumanLoadReport load_human_ratings(const std::string& path, const ColorLibrary& lib);

void write_human_ratings(const std::map<std::string, HumanRatingSet>& sets,
                         const std::string& path);

// ---- concreteness norms -----------------------------------------------------

class ConcretenessNorms {
 public:
  void insert(const std::string& word, double rating);
  std::optional<double> lookup(const std::string& word) const;  // case-insensitive
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::string, double> map_;  // lowercased keys
};

struct ConcretenessLoadReport {
  ConcretenessNorms norms;
  int duplicate_count = 0;
  std::vector<std::string> warnings;
};

// Loads a CSV with header word,concreteness (1-5 scale). Duplicate words are
// last-wins with a warning.
ConcretenessLoadReport load_concreteness(const std::string& path);

// ---- rating cache (JSON lines) ----------------------------------------------

std::string record_to_json_line(const RatingRecord& rec);
RatingRecord record_from_json_line(const std::string& line);

// Append-only JSONL writer; appends are serialized through one mutex.
class CacheWriter {
 public:
  explicit CacheWriter(const std::string& path);
  void append(const RatingRecord& rec);

 private:
  std::ofstream out_;
  std::mutex mu_;
};

// Missing file reads as an empty cache.
std::vector<RatingRecord> read_cache(const std::string& path);

// ---- run manifest -------------------------------------------------------

struct LibrarySelector {
  std::string kind;  // "uw71" or "csv"
  std::string csv_path;
};

struct RatingKey {
  std::string concept_name;
  int color_index = 0;  // 1-based
  int repetition = 0;   // 0-based
  auto operator<=>(const RatingKey&) const = default;
};

struct RunManifest {
  std::string protocol_name;
  std::string model_id;
  std::string library_name;
  LibrarySelector library;
  std::vector<std::string> concepts;
  int n_colors = 0;
  int repetitions = 0;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  // completed[concept][color][repetition]: a parsed rating exists
  std::map<std::string, std::vector<std::vector<bool>>> completed;

  void mark_completed(const RatingKey& key);
  std::set<RatingKey> all_keys() const;
};

void write_manifest(const RunManifest& m, const std::string& path);
RunManifest read_manifest(const std::string& path);

// Keys of the manifest's Cartesian product that lack a successfully parsed
// record in the cache. Throws ValidationError when cache records disagree
// with the manifest's protocol or model.
std::set<RatingKey> resume_run(const RunManifest& manifest,
                               const std::string& cache_path);

}  // namespace chroma
