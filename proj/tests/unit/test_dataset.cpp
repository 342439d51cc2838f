#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "helpers.hpp"
#include "intimacy/dataset.hpp"
#include "intimacy/util.hpp"

using namespace intimacy;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("remap_score endpoints and midpoint") {
  CHECK(remap_score(-1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(remap_score(0.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(remap_score(1.0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("remap_score matches linear interpolation oracle") {
  // Independent oracle: interpolate between the range endpoints.
  auto lerp_oracle = [](double s) {
    const double t = (s - (-1.0)) / 2.0;
    return 1.0 + t * (5.0 - 1.0);
  };
  CHECK(remap_score(0.5) == doctest::Approx(lerp_oracle(0.5)).epsilon(1e-12));
  CHECK(remap_score(0.5) == doctest::Approx(4.0).epsilon(1e-12));

  std::mt19937_64 gen(7);
  for (int i = 0; i < 1000; ++i) {
    const double s = -1.0 + 2.0 * hash_unit(gen());
    CHECK(remap_score(s) == doctest::Approx(lerp_oracle(s)).epsilon(1e-12));
  }
}

TEST_CASE("remap_score is strictly increasing and inverts") {
  std::mt19937_64 gen(11);
  std::vector<double> points;
  for (int i = 0; i < 1000; ++i) points.push_back(-1.0 + 2.0 * hash_unit(gen()));
  std::sort(points.begin(), points.end());
  double prev_in = -1.0, prev_out = remap_score(-1.0);
  for (double s : points) {
    const double out = remap_score(s);
    if (s > prev_in) CHECK(out > prev_out);
    CHECK(remap_score_inverse(out) == doctest::Approx(s).epsilon(1e-12));
    prev_in = s;
    prev_out = out;
  }
}

TEST_CASE("remap_score rejects out-of-range input") {
  CHECK_THROWS_AS(remap_score(-1.0001), ValidationError);
  CHECK_THROWS_AS(remap_score(1.5), ValidationError);
  CHECK_THROWS_AS(remap_score_inverse(0.9), ValidationError);
}

TEST_CASE("load_corpus maps fields directly") {
  TempDir dir("load");
  write_file(dir.file("c.csv"),
             "text,language,label\n"
             "@user great!,english,2.2\n");
  auto rows = load_corpus(dir.file("c.csv"), Source::primary, kIntimacyRange);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].text == "@user great!");
  CHECK(rows[0].language == "english");
  CHECK(rows[0].score == 2.2);
  CHECK(rows[0].source == Source::primary);
  CHECK(rows[0].id == "primary:0");
}

TEST_CASE("load_corpus treats zero labels in test files as unannotated") {
  TempDir dir("sentinel");
  write_file(dir.file("t.csv"),
             "text,language,label\n"
             "some english tweet,english,0\n"
             "another tweet,english,3.5\n");
  auto rows = load_corpus(dir.file("t.csv"), Source::test, kIntimacyRange);
  REQUIRE(rows.size() == 2);
  CHECK(!rows[0].score.has_value());
  CHECK(rows[1].score == 3.5);
}

TEST_CASE("load_corpus rejects out-of-range labels with the row number") {
  TempDir dir("range");
  write_file(dir.file("p.csv"),
             "text,language,label\n"
             "fine tweet,english,2.0\n"
             "bad tweet,english,7.3\n");
  try {
    load_corpus(dir.file("p.csv"), Source::primary, kIntimacyRange);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    CHECK(std::string(e.what()).find("7.3") != std::string::npos);
  }
}

TEST_CASE("load_corpus error cases") {
  TempDir dir("errors");
  CHECK_THROWS_AS(load_corpus(dir.file("absent.csv"), Source::test, kIntimacyRange),
                  IoError);

  write_file(dir.file("nohdr.csv"), "a,b,c\nx,english,2\n");
  CHECK_THROWS_AS(load_corpus(dir.file("nohdr.csv"), Source::test, kIntimacyRange),
                  ParseError);

  write_file(dir.file("short.csv"), "text,language,label\nonly two,english\n");
  CHECK_THROWS_AS(load_corpus(dir.file("short.csv"), Source::test, kIntimacyRange),
                  ParseError);

  write_file(dir.file("badnum.csv"), "text,language,label\nhey there,english,abc\n");
  CHECK_THROWS_AS(load_corpus(dir.file("badnum.csv"), Source::test, kIntimacyRange),
                  ParseError);

  write_file(dir.file("blank.csv"), "text,language,label\n\"   \",english,2\n");
  CHECK_THROWS_AS(load_corpus(dir.file("blank.csv"), Source::test, kIntimacyRange),
                  ParseError);

  write_file(dir.file("nolang.csv"), "text,language,label\nhello world,,2\n");
  CHECK_THROWS_AS(load_corpus(dir.file("nolang.csv"), Source::test, kIntimacyRange),
                  ParseError);

  write_file(dir.file("badutf8.csv"),
             std::string("text,language,label\nbad \xC3 byte,english,2\n"));
  CHECK_THROWS_AS(load_corpus(dir.file("badutf8.csv"), Source::test, kIntimacyRange),
                  ParseError);
}

TEST_CASE("load_corpus keeps rows with unknown language codes") {
  TempDir dir("unknown");
  write_file(dir.file("u.csv"),
             "text,language,label\n"
             "nuqneH jupwI',klingon,2.5\n");
  auto rows = load_corpus(dir.file("u.csv"), Source::test, kIntimacyRange);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].language == "klingon");
}

TEST_CASE("load_corpus handles quoting, custom columns and delimiters") {
  TempDir dir("quoted");
  write_file(dir.file("q.csv"),
             "tweet;lang;score\n"
             "\"hello; with \"\"quotes\"\" and\nnewline\";English;4.5\n");
  ColumnNames columns{"tweet", "lang", "score"};
  auto rows = load_corpus(dir.file("q.csv"), Source::primary, kIntimacyRange,
                          columns, CsvOptions{';'});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].text == "hello; with \"quotes\" and\nnewline");
  CHECK(rows[0].language == "english");  // lowercased
  CHECK(rows[0].score == 4.5);
}

TEST_CASE("load_auxiliary remaps raw scores onto the intimacy scale") {
  TempDir dir("aux");
  write_file(dir.file("q.csv"),
             "text,language,label\n"
             "How are you feeling today?,english,-1\n"
             "What is your deepest fear?,english,1\n"
             "Tea or coffee?,english,0\n");
  auto rows = load_auxiliary(dir.file("q.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].score == 1.0);
  CHECK(rows[1].score == 5.0);
  CHECK(rows[2].score == 3.0);  // 0 is a valid raw label here, not a sentinel
  CHECK(rows[0].source == Source::auxiliary);
}

TEST_CASE("corpus round-trip preserves fields") {
  const auto fixture = testutil::fixtures_dir() / "fixture_test.csv";
  auto original = load_corpus(fixture, Source::test, kIntimacyRange);
  REQUIRE(original.size() == 60);

  TempDir dir("roundtrip");
  write_corpus(dir.file("copy.csv"), original);
  auto reloaded = load_corpus(dir.file("copy.csv"), Source::test, kIntimacyRange);
  REQUIRE(reloaded.size() == original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    CHECK(fields_equal(original[i], reloaded[i]));
  }
}

TEST_CASE("corpus round-trip survives awkward texts and unannotated rows") {
  std::vector<LabeledExample> tricky;
  auto add = [&](std::string text, std::optional<double> score) {
    LabeledExample ex;
    ex.id = "test:" + std::to_string(tricky.size());
    ex.text = std::move(text);
    ex.language = "english";
    ex.score = score;
    ex.source = Source::test;
    tricky.push_back(std::move(ex));
  };
  add("comma, quote \" and\nnewline", 2.25);
  add("trailing space ", 1.0 + 1.0 / 3.0);
  add("emoji 💜 and 中文", std::nullopt);
  add("\"fully quoted\"", 4.999999999999999);

  TempDir dir("tricky");
  write_corpus(dir.file("t.csv"), tricky);
  auto reloaded = load_corpus(dir.file("t.csv"), Source::test, kIntimacyRange);
  REQUIRE(reloaded.size() == tricky.size());
  for (std::size_t i = 0; i < tricky.size(); ++i) {
    CHECK(fields_equal(tricky[i], reloaded[i]));
  }
}

namespace {

std::vector<LabeledExample> synthetic_primary(std::size_t n) {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledExample ex;
    ex.id = "primary:" + std::to_string(i);
    ex.text = "tweet number " + std::to_string(i);
    ex.language = i % 2 == 0 ? "english" : "french";
    ex.score = 1.0 + static_cast<double>(i % 5);
    ex.source = Source::primary;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

TEST_CASE("make_splits reproduces the published split arithmetic") {
  auto primary = synthetic_primary(9491);
  auto auxiliary = synthetic_primary(2247);
  for (auto& ex : auxiliary) ex.source = Source::auxiliary;

  auto split = make_splits(primary, auxiliary, 1709, 42);
  CHECK(split.train.size() == 10029);
  CHECK(split.validation.size() == 1709);
  CHECK(split.train_provenance.primary == 9491 - 1709);
  CHECK(split.train_provenance.auxiliary == 2247);
  CHECK(split.validation_provenance.primary == 1709);
  CHECK(split.validation_provenance.auxiliary == 0);
}

TEST_CASE("make_splits degenerate case keeps everything in train") {
  auto primary = synthetic_primary(10);
  auto split = make_splits(primary, {}, 0, 1);
  CHECK(split.train.size() == 10);
  CHECK(split.validation.empty());
}

TEST_CASE("make_splits is deterministic for a fixed seed") {
  auto primary = synthetic_primary(200);
  auto a = make_splits(primary, {}, 50, 1234);
  auto b = make_splits(primary, {}, 50, 1234);
  REQUIRE(a.validation.size() == b.validation.size());
  for (std::size_t i = 0; i < a.validation.size(); ++i) {
    CHECK(a.validation[i].id == b.validation[i].id);
  }
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].id == b.train[i].id);
  }
  auto c = make_splits(primary, {}, 50, 1235);
  bool any_difference = false;
  for (std::size_t i = 0; i < c.validation.size(); ++i) {
    any_difference |= c.validation[i].id != a.validation[i].id;
  }
  CHECK(any_difference);
}

TEST_CASE("make_splits partitions the primary corpus") {
  auto primary = synthetic_primary(137);
  auto split = make_splits(primary, {}, 41, 7);
  std::set<std::string> train_ids, validation_ids;
  for (const auto& ex : split.train) train_ids.insert(ex.id);
  for (const auto& ex : split.validation) validation_ids.insert(ex.id);
  CHECK(train_ids.size() == split.train.size());
  CHECK(validation_ids.size() == 41);
  for (const auto& ex : primary) {
    CHECK(train_ids.count(ex.id) + validation_ids.count(ex.id) == 1);
  }
}

TEST_CASE("make_splits rejects bad inputs") {
  auto primary = synthetic_primary(5);
  CHECK_THROWS_AS(make_splits(primary, {}, 5, 0), ValidationError);
  CHECK_THROWS_AS(make_splits(primary, {}, 9, 0), ValidationError);

  auto with_hole = primary;
  with_hole[2].score.reset();
  CHECK_THROWS_AS(make_splits(with_hole, {}, 1, 0), ValidationError);
}

TEST_CASE("stratified sampling keeps per-language proportions") {
  std::vector<LabeledExample> primary;
  auto add_language = [&](const std::string& lang, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      LabeledExample ex;
      ex.id = lang + ":" + std::to_string(i);
      ex.text = lang + " tweet " + std::to_string(i);
      ex.language = lang;
      ex.score = 1.0 + static_cast<double>(i % 4);
      ex.source = Source::primary;
      primary.push_back(std::move(ex));
    }
  };
  add_language("english", 300);
  add_language("french", 200);
  add_language("chinese", 100);

  auto split = make_splits(primary, {}, 60, 9, /*stratify_by_language=*/true);
  std::map<std::string, int> counts;
  for (const auto& ex : split.validation) ++counts[ex.language];
  CHECK(counts["english"] == 30);
  CHECK(counts["french"] == 20);
  CHECK(counts["chinese"] == 10);
}

TEST_CASE("filter_scored keeps order and is idempotent") {
  auto primary = synthetic_primary(5);
  primary[1].score.reset();
  primary[4].score.reset();

  auto kept = filter_scored(primary);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].id == "primary:0");
  CHECK(kept[1].id == "primary:2");
  CHECK(kept[2].id == "primary:3");

  auto twice = filter_scored(kept);
  REQUIRE(twice.size() == kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    CHECK(fields_equal(twice[i], kept[i]));
  }

  std::vector<LabeledExample> unannotated(3);
  for (auto& ex : unannotated) {
    ex.text = "x";
    ex.language = "english";
  }
  CHECK(filter_scored(unannotated).empty());
}

TEST_CASE("write_split emits three corpus files and a manifest") {
  auto primary = synthetic_primary(20);
  auto split = make_splits(primary, {}, 5, 3);
  split.test = synthetic_primary(4);
  for (auto& ex : split.test) {
    ex.source = Source::test;
    split.test_provenance.add(ex.source);
  }

  TempDir dir("split");
  write_split(dir.path(), split);
  CHECK(std::filesystem::exists(dir.file("train.csv")));
  CHECK(std::filesystem::exists(dir.file("validation.csv")));
  CHECK(std::filesystem::exists(dir.file("test.csv")));

  const auto manifest = testutil::read_file(dir.file("manifest.json"));
  CHECK(manifest.find("\"train\": 15") != std::string::npos);
  CHECK(manifest.find("\"validation\": 5") != std::string::npos);
  CHECK(manifest.find("\"seed\": 3") != std::string::npos);
}
