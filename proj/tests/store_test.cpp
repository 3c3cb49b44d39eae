#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "chroma/colorlib.hpp"
#include "chroma/error.hpp"
#include "chroma/rng.hpp"
#include "chroma/store.hpp"
#include "test_util.hpp"

using namespace chroma;

namespace {

std::string ratings_csv(int participants, int colors, const std::string& concept_name,
                        std::uint64_t seed) {
  Rng rng(seed);
  std::ostringstream out;
  out << "participant_id,concept,color_index,rating\n";
  for (int p = 0; p < participants; ++p) {
    for (int c = 1; c <= colors; ++c) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.3f", rng.uniform());
      out << 'p' << p << ',' << concept_name << ',' << c << ',' << buf << '\n';
    }
  }
  return out.str();
}

}  // namespace

TEST_CASE("load_human_ratings basic shape") {
  testutil::TempDir tmp("store");
  const ColorLibrary lib = load_uw71();
  testutil::write_file(tmp.str("h.csv"), ratings_csv(2, 71, "apple", 1));
  const HumanLoadReport rep = load_human_ratings(tmp.str("h.csv"), lib);
  REQUIRE(rep.sets.count("apple") == 1);
  const HumanRatingSet& set = rep.sets.at("apple");
  CHECK(set.participants() == 2);
  CHECK(set.colors() == 71);
  CHECK(rep.warnings.empty());
}

TEST_CASE("load_human_ratings matches a table-sized cohort") {
  testutil::TempDir tmp("store52");
  const ColorLibrary lib = load_uw71();
  testutil::write_file(tmp.str("h.csv"), ratings_csv(52, 71, "driving", 2));
  const HumanLoadReport rep = load_human_ratings(tmp.str("h.csv"), lib);
  CHECK(rep.sets.at("driving").participants() == 52);
}

TEST_CASE("load_human_ratings error paths") {
  testutil::TempDir tmp("store_err");
  const ColorLibrary lib = load_uw71();

  SUBCASE("out-of-range rating names the row") {
    testutil::write_file(tmp.str("h.csv"),
                         "participant_id,concept,color_index,rating\n"
                         "p0,apple,1,1.2\n");
    try {
      load_human_ratings(tmp.str("h.csv"), lib);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
      CHECK(std::string(e.what()).find("1.2") != std::string::npos);
    }
  }

  SUBCASE("unknown color index") {
    testutil::write_file(tmp.str("h.csv"),
                         "participant_id,concept,color_index,rating\n"
                         "p0,apple,72,0.5\n");
    CHECK_THROWS_AS(load_human_ratings(tmp.str("h.csv"), lib), SchemaError);
  }

  SUBCASE("schema mismatch") {
    testutil::write_file(tmp.str("h.csv"), "a,b\n1,2\n");
    CHECK_THROWS_AS(load_human_ratings(tmp.str("h.csv"), lib), SchemaError);
  }

  SUBCASE("duplicate key") {
    testutil::write_file(tmp.str("h.csv"),
                         "participant_id,concept,color_index,rating\n"
                         "p0,apple,1,0.5\n"
                         "p0,apple,1,0.6\n");
    CHECK_THROWS_AS(load_human_ratings(tmp.str("h.csv"), lib), SchemaError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_human_ratings(tmp.str("nope.csv"), lib), SchemaError);
  }
}

TEST_CASE("load_human_ratings rejects incomplete participants with a report") {
  testutil::TempDir tmp("store_incomplete");
  const ColorLibrary lib = load_uw71();
  std::string text = ratings_csv(2, 71, "apple", 3);
  text += "p9,apple,1,0.5\n";  // p9 rated only one color
  testutil::write_file(tmp.str("h.csv"), text);
  const HumanLoadReport rep = load_human_ratings(tmp.str("h.csv"), lib);
  CHECK(rep.sets.at("apple").participants() == 2);
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("p9") != std::string::npos);
}

TEST_CASE("load_human_ratings warns about unknown columns") {
  testutil::TempDir tmp("store_cols");
  const ColorLibrary lib = load_uw71();
  std::ostringstream out;
  out << "participant_id,concept,color_index,rating,age\n";
  Rng rng(4);
  for (int c = 1; c <= 71; ++c) out << "p0,apple," << c << ',' << rng.uniform() << ",99\n";
  testutil::write_file(tmp.str("h.csv"), out.str());
  const HumanLoadReport rep = load_human_ratings(tmp.str("h.csv"), lib);
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("age") != std::string::npos);
}

TEST_CASE("human ratings round trip is lossless") {
  testutil::TempDir tmp("store_rt");
  const ColorLibrary lib = load_uw71();
  testutil::write_file(tmp.str("h1.csv"), ratings_csv(3, 71, "apple", 5));
  const HumanLoadReport rep1 = load_human_ratings(tmp.str("h1.csv"), lib);
  write_human_ratings(rep1.sets, tmp.str("h2.csv"));
  const HumanLoadReport rep2 = load_human_ratings(tmp.str("h2.csv"), lib);
  write_human_ratings(rep2.sets, tmp.str("h3.csv"));
  CHECK(testutil::read_file(tmp.str("h2.csv")) == testutil::read_file(tmp.str("h3.csv")));
  CHECK((rep1.sets.at("apple").ratings - rep2.sets.at("apple").ratings).norm() == 0.0);
}

TEST_CASE("load_concreteness") {
  testutil::TempDir tmp("conc");
  testutil::write_file(tmp.str("c.csv"),
                       "word,concreteness\n"
                       "banana,5.0\n"
                       "Love,1.4\n"
                       "banana,4.5\n");
  const ConcretenessLoadReport rep = load_concreteness(tmp.str("c.csv"));
  CHECK(rep.norms.lookup("Banana") == 4.5);  // last wins, case folded
  CHECK(rep.norms.lookup("LOVE") == 1.4);
  CHECK_FALSE(rep.norms.lookup("missing").has_value());
  CHECK(rep.duplicate_count == 1);
  REQUIRE(rep.warnings.size() == 1);

  testutil::write_file(tmp.str("bad.csv"), "word,concreteness\nx,notanumber\n");
  CHECK_THROWS_AS(load_concreteness(tmp.str("bad.csv")), SchemaError);
  testutil::write_file(tmp.str("oob.csv"), "word,concreteness\nx,7.5\n");
  CHECK_THROWS_AS(load_concreteness(tmp.str("oob.csv")), SchemaError);
}

TEST_CASE("rating record JSONL round trip") {
  RatingRecord rec;
  rec.concept_name = "apple";
  rec.color_index = 3;
  rec.repetition = 2;
  rec.hex = "#8558F4";
  rec.raw_response = "0.500\nextra \"text\"";
  rec.parsed_value = 0.5;
  rec.attempts = 2;
  rec.protocol_name = "stochastic_averaged";
  rec.model_id = "gpt-4";
  rec.timestamp = "2024-06-14T00:00:00Z";

  const RatingRecord back = record_from_json_line(record_to_json_line(rec));
  CHECK(back.concept_name == rec.concept_name);
  CHECK(back.color_index == rec.color_index);
  CHECK(back.repetition == rec.repetition);
  CHECK(back.hex == rec.hex);
  CHECK(back.raw_response == rec.raw_response);
  CHECK(back.parsed_value == rec.parsed_value);
  CHECK(back.attempts == rec.attempts);
  CHECK(back.protocol_name == rec.protocol_name);
  CHECK(back.model_id == rec.model_id);
  CHECK(back.timestamp == rec.timestamp);

  rec.parsed_value.reset();
  CHECK_FALSE(record_from_json_line(record_to_json_line(rec)).parsed_value.has_value());

  CHECK_THROWS_AS(record_from_json_line("{not json"), SchemaError);
}

TEST_CASE("cache writer appends and read_cache tolerates a missing file") {
  testutil::TempDir tmp("cache");
  CHECK(read_cache(tmp.str("absent.jsonl")).empty());

  {
    CacheWriter writer(tmp.str("c.jsonl"));
    RatingRecord rec;
    rec.concept_name = "a";
    rec.color_index = 1;
    rec.protocol_name = "single_deterministic";
    rec.model_id = "gpt-4";
    rec.parsed_value = 0.25;
    writer.append(rec);
    rec.color_index = 2;
    writer.append(rec);
  }
  {
    CacheWriter writer(tmp.str("c.jsonl"));  // append mode keeps old lines
    RatingRecord rec;
    rec.concept_name = "a";
    rec.color_index = 3;
    rec.protocol_name = "single_deterministic";
    rec.model_id = "gpt-4";
    writer.append(rec);
  }
  const auto records = read_cache(tmp.str("c.jsonl"));
  REQUIRE(records.size() == 3);
  CHECK(records[2].color_index == 3);
}

TEST_CASE("manifest round trip and resume") {
  testutil::TempDir tmp("manifest");
  RunManifest m;
  m.protocol_name = "single_deterministic";
  m.model_id = "gpt-4";
  m.library_name = "UW-71";
  m.library = LibrarySelector{"uw71", ""};
  m.n_colors = 71;
  m.repetitions = 1;
  m.seed = 7;
  m.started_at = "2024-01-01T00:00:00Z";

  std::ifstream concepts_in(CONCEPTS_FILE);
  REQUIRE(concepts_in.good());
  std::string line;
  while (std::getline(concepts_in, line)) {
    if (!line.empty()) m.concepts.push_back(line);
  }
  REQUIRE(m.concepts.size() == 70);
  for (const auto& c : m.concepts) {
    m.completed[c] = std::vector<std::vector<bool>>(71, std::vector<bool>(1, false));
  }

  write_manifest(m, tmp.str("m.json"));
  const RunManifest back = read_manifest(tmp.str("m.json"));
  CHECK(back.protocol_name == m.protocol_name);
  CHECK(back.concepts == m.concepts);
  CHECK(back.completed.size() == 70);
  CHECK(back.all_keys().size() == 4970);

  SUBCASE("empty cache leaves the full product") {
    CHECK(resume_run(back, tmp.str("missing.jsonl")).size() == 4970);
  }

  SUBCASE("a partial cache leaves the difference") {
    CacheWriter writer(tmp.str("c.jsonl"));
    int written = 0;
    for (const auto& concept_name : m.concepts) {
      for (int color = 1; color <= 71 && written < 4900; ++color, ++written) {
        RatingRecord rec;
        rec.concept_name = concept_name;
        rec.color_index = color;
        rec.repetition = 0;
        rec.protocol_name = m.protocol_name;
        rec.model_id = m.model_id;
        rec.parsed_value = 0.5;
        writer.append(rec);
      }
    }
    const auto remaining = resume_run(back, tmp.str("c.jsonl"));
    CHECK(remaining.size() == 70);
    // unparsed records do not count as done
    CacheWriter writer2(tmp.str("c.jsonl"));
    RatingRecord bad;
    bad.concept_name = m.concepts.back();
    bad.color_index = 71;
    bad.repetition = 0;
    bad.protocol_name = m.protocol_name;
    bad.model_id = m.model_id;
    writer2.append(bad);
    CHECK(resume_run(back, tmp.str("c.jsonl")).size() == 70);
  }

  SUBCASE("complete cache leaves nothing") {
    CacheWriter writer(tmp.str("c.jsonl"));
    for (const auto& key : back.all_keys()) {
      RatingRecord rec;
      rec.concept_name = key.concept_name;
      rec.color_index = key.color_index;
      rec.repetition = key.repetition;
      rec.protocol_name = m.protocol_name;
      rec.model_id = m.model_id;
      rec.parsed_value = 0.5;
      writer.append(rec);
    }
    CHECK(resume_run(back, tmp.str("c.jsonl")).empty());
  }

  SUBCASE("protocol mismatch is rejected") {
    CacheWriter writer(tmp.str("c.jsonl"));
    RatingRecord rec;
    rec.concept_name = m.concepts.front();
    rec.color_index = 1;
    rec.protocol_name = "stochastic_averaged";
    rec.model_id = m.model_id;
    rec.parsed_value = 0.5;
    writer.append(rec);
    CHECK_THROWS_AS(resume_run(back, tmp.str("c.jsonl")), ValidationError);
  }
}
