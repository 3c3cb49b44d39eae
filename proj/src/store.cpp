#include "chroma/store.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "chroma/csv.hpp"
#include "chroma/error.hpp"

namespace chroma {

namespace {

using nlohmann::json;

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

int column_of(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return -1;
  return static_cast<int>(it - header.begin());
}

}  // namespace

HumanLoadReport load_human_ratings(const std::string& path, const ColorLibrary& lib) {
  const csv::Table t = csv::read_file(path);
  const int c_pid = column_of(t.header, "participant_id");
  const int c_concept = column_of(t.header, "concept");
  const int c_color = column_of(t.header, "color_index");
  const int c_rating = column_of(t.header, "rating");
  if (c_pid < 0 || c_concept < 0 || c_color < 0 || c_rating < 0) {
    throw SchemaError("human ratings CSV must have header "
                      "participant_id,concept,color_index,rating: " + path);
  }

  HumanLoadReport report;
  for (const std::string& col : t.header) {
    if (col != "participant_id" && col != "concept" && col != "color_index" &&
        col != "rating") {
      report.warnings.push_back("ignoring unknown column '" + col + "'");
    }
  }

  const int n_colors = static_cast<int>(lib.colors.size());
  // (concept, participant) -> per-color ratings
  std::map<std::string, std::map<std::string, std::vector<std::optional<double>>>> acc;
  std::size_t line_no = 1;
  for (const auto& row : t.rows) {
    ++line_no;
    if (static_cast<int>(row.size()) <= std::max({c_pid, c_concept, c_color, c_rating})) {
      throw SchemaError("human ratings row " + std::to_string(line_no) +
                        " has too few fields");
    }
    const std::string& pid = row[c_pid];
    const std::string& concept_name = row[c_concept];
    const int color_index = std::stoi(row[c_color]);
    const double rating = csv::parse_double(row[c_rating]);
    if (color_index < 1 || color_index > n_colors) {
      throw SchemaError("human ratings row " + std::to_string(line_no) +
                        ": color_index " + std::to_string(color_index) +
                        " outside [1, " + std::to_string(n_colors) + "]");
    }
    if (rating < 0.0 || rating > 1.0) {
      throw SchemaError("human ratings row " + std::to_string(line_no) + ": rating " +
                        csv::format_double(rating) + " outside [0, 1]");
    }
    auto& cell = acc[concept_name][pid];
    if (cell.empty()) cell.resize(n_colors);
    if (cell[color_index - 1].has_value()) {
      throw SchemaError("human ratings row " + std::to_string(line_no) +
                        ": duplicate (participant, concept, color)");
    }
    cell[color_index - 1] = rating;
  }

  for (auto& [concept_name, participants] : acc) {
    std::vector<std::pair<std::string, std::vector<std::optional<double>>>> complete;
    for (auto& [pid, ratings] : participants) {
      const bool full = std::all_of(ratings.begin(), ratings.end(),
                                    [](const auto& v) { return v.has_value(); });
      if (full) {
        complete.emplace_back(pid, ratings);
      } else {
        report.warnings.push_back("rejected participant '" + pid + "' for concept '" +
                                  concept_name + "': incomplete color coverage");
      }
    }
    if (complete.empty()) continue;
    HumanRatingSet set;
    set.concept_name = concept_name;
    set.ratings.resize(static_cast<Eigen::Index>(complete.size()), n_colors);
    for (std::size_t i = 0; i < complete.size(); ++i) {
      set.participant_ids.push_back(complete[i].first);
      for (int c = 0; c < n_colors; ++c) {
        set.ratings(static_cast<Eigen::Index>(i), c) = *complete[i].second[c];
      }
    }
    report.sets.emplace(concept_name, std::move(set));
  }
  return report;
}

void write_human_ratings(const std::map<std::string, HumanRatingSet>& sets,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write human ratings CSV: " + path);
  out << "participant_id,concept,color_index,rating\n";
  for (const auto& [concept_name, set] : sets) {
    for (int p = 0; p < set.participants(); ++p) {
      for (int c = 0; c < set.colors(); ++c) {
        out << csv::escape(set.participant_ids[p]) << ',' << csv::escape(concept_name)
            << ',' << c + 1 << ',' << csv::format_double(set.ratings(p, c)) << '\n';
      }
    }
  }
}

void ConcretenessNorms::insert(const std::string& word, double rating) {
  map_[to_lower(word)] = rating;
}

std::optional<double> ConcretenessNorms::lookup(const std::string& word) const {
  const auto it = map_.find(to_lower(word));
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

ConcretenessLoadReport load_concreteness(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const int c_word = column_of(t.header, "word");
  const int c_rating = column_of(t.header, "concreteness");
  if (c_word < 0 || c_rating < 0) {
    throw SchemaError("concreteness CSV must have header word,concreteness: " + path);
  }
  ConcretenessLoadReport report;
  for (const std::string& col : t.header) {
    if (col != "word" && col != "concreteness") {
      report.warnings.push_back("ignoring unknown column '" + col + "'");
    }
  }
  std::size_t line_no = 1;
  for (const auto& row : t.rows) {
    ++line_no;
    if (static_cast<int>(row.size()) <= std::max(c_word, c_rating)) {
      throw SchemaError("concreteness row " + std::to_string(line_no) +
                        " has too few fields");
    }
    const std::string word = to_lower(row[c_word]);
    const double rating = csv::parse_double(row[c_rating]);
    if (rating < 1.0 || rating > 5.0) {
      throw SchemaError("concreteness row " + std::to_string(line_no) + ": rating " +
                        csv::format_double(rating) + " outside the 1-5 scale");
    }
    if (report.norms.lookup(word)) {
      ++report.duplicate_count;
      report.warnings.push_back("duplicate word '" + word + "', keeping last value");
    }
    report.norms.insert(word, rating);
  }
  return report;
}

std::string record_to_json_line(const RatingRecord& rec) {
  json j{{"protocol", rec.protocol_name},
         {"model", rec.model_id},
         {"concept", rec.concept_name},
         {"color_index", rec.color_index},
         {"repetition", rec.repetition},
         {"hex", rec.hex},
         {"raw_response", rec.raw_response},
         {"attempts", rec.attempts},
         {"timestamp", rec.timestamp}};
  if (rec.parsed_value) {
    j["parsed_value"] = *rec.parsed_value;
  } else {
    j["parsed_value"] = nullptr;
  }
  return j.dump();
}

RatingRecord record_from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    RatingRecord rec;
    rec.protocol_name = j.at("protocol").get<std::string>();
    rec.model_id = j.at("model").get<std::string>();
    rec.concept_name = j.at("concept").get<std::string>();
    rec.color_index = j.at("color_index").get<int>();
    rec.repetition = j.at("repetition").get<int>();
    rec.hex = j.at("hex").get<std::string>();
    rec.raw_response = j.at("raw_response").get<std::string>();
    rec.attempts = j.at("attempts").get<int>();
    rec.timestamp = j.at("timestamp").get<std::string>();
    if (!j.at("parsed_value").is_null()) {
      rec.parsed_value = j.at("parsed_value").get<double>();
    }
    return rec;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed cache line: ") + e.what());
  }
}

CacheWriter::CacheWriter(const std::string& path)
    : out_(path, std::ios::app) {
  if (!out_) throw SchemaError("cannot open cache for append: " + path);
}

void CacheWriter::append(const RatingRecord& rec) {
  std::lock_guard lock(mu_);
  out_ << record_to_json_line(rec) << '\n';
  out_.flush();
}

std::vector<RatingRecord> read_cache(const std::string& path) {
  std::ifstream in(path);
  std::vector<RatingRecord> records;
  if (!in) return records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json_line(line));
  }
  return records;
}

void RunManifest::mark_completed(const RatingKey& key) {
  auto it = completed.find(key.concept_name);
  if (it == completed.end()) throw ValidationError("manifest: unknown concept");
  it->second.at(key.color_index - 1).at(key.repetition) = true;
}

std::set<RatingKey> RunManifest::all_keys() const {
  std::set<RatingKey> keys;
  for (const std::string& c : concepts) {
    for (int i = 1; i <= n_colors; ++i) {
      for (int r = 0; r < repetitions; ++r) keys.insert(RatingKey{c, i, r});
    }
  }
  return keys;
}

void write_manifest(const RunManifest& m, const std::string& path) {
  json status = json::object();
  for (const auto& [concept_name, grid] : m.completed) {
    json rows = json::array();
    for (const auto& reps : grid) rows.push_back(reps);
    status[concept_name] = rows;
  }
  const json j{{"protocol", m.protocol_name},
               {"model", m.model_id},
               {"library_name", m.library_name},
               {"library", {{"kind", m.library.kind}, {"csv_path", m.library.csv_path}}},
               {"concepts", m.concepts},
               {"n_colors", m.n_colors},
               {"repetitions", m.repetitions},
               {"seed", m.seed},
               {"started_at", m.started_at},
               {"finished_at", m.finished_at},
               {"completed", status}};
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open manifest: " + path);
  try {
    const json j = json::parse(in);
    RunManifest m;
    m.protocol_name = j.at("protocol").get<std::string>();
    m.model_id = j.at("model").get<std::string>();
    m.library_name = j.at("library_name").get<std::string>();
    m.library.kind = j.at("library").at("kind").get<std::string>();
    m.library.csv_path = j.at("library").at("csv_path").get<std::string>();
    m.concepts = j.at("concepts").get<std::vector<std::string>>();
    m.n_colors = j.at("n_colors").get<int>();
    m.repetitions = j.at("repetitions").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    for (const auto& [concept_name, rows] : j.at("completed").items()) {
      std::vector<std::vector<bool>> grid;
      for (const auto& reps : rows) grid.push_back(reps.get<std::vector<bool>>());
      m.completed[concept_name] = std::move(grid);
    }
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed manifest: ") + e.what());
  }
}

std::set<RatingKey> resume_run(const RunManifest& manifest,
                               const std::string& cache_path) {
  std::set<RatingKey> remaining = manifest.all_keys();
  for (const RatingRecord& rec : read_cache(cache_path)) {
    if (rec.protocol_name != manifest.protocol_name ||
        rec.model_id != manifest.model_id) {
      throw ValidationError("cache record does not match manifest protocol/model (" +
                            rec.protocol_name + "/" + rec.model_id + " vs " +
                            manifest.protocol_name + "/" + manifest.model_id + ")");
    }
    if (!rec.parsed_value) continue;
    remaining.erase(RatingKey{rec.concept_name, rec.color_index, rec.repetition});
  }
  return remaining;
}

}  // namespace chroma
