#include <doctest.h>

#include "helpers.hpp"
#include "intimacy/registry.hpp"
#include "intimacy/util.hpp"

using namespace intimacy;
using testutil::TempDir;

namespace {

std::vector<std::string> ids(const std::vector<ModelSpec>& specs) {
  std::vector<std::string> out;
  for (const auto& s : specs) out.push_back(s.id);
  return out;
}

ModelSpec multilingual_spec(std::string id, std::string artifact = "org/model") {
  return {std::move(id), ModelKind::multilingual, std::nullopt,
          std::move(artifact), kMultilingualLearningRate};
}

ModelSpec specialist_spec(std::string id, std::string language,
                          std::string artifact = "org/model") {
  return {std::move(id), ModelKind::language_specific, std::move(language),
          std::move(artifact), kLanguageSpecificLearningRate};
}

}  // namespace

TEST_CASE("default registry carries three multilingual members and six specialists") {
  const Registry registry = default_registry();
  CHECK(registry.members().size() == 9);
  CHECK(registry.multilingual_members().size() == 3);

  CHECK(ids(registry.multilingual_members()) ==
        std::vector<std::string>{"xlm-t", "xlm-roberta", "mbert"});

  // Artifact identifiers are the published model card names.
  CHECK(registry.find("xlm-t")->artifact_id == "cardiffnlp/twitter-xlm-roberta-base");
  CHECK(registry.find("xlm-roberta")->artifact_id == "xlm-roberta-base");
  CHECK(registry.find("mbert")->artifact_id == "bert-base-multilingual-cased");
  CHECK(registry.specialist_for("english")->artifact_id ==
        "cardiffnlp/twitter-roberta-base-sentiment-latest");
  CHECK(registry.specialist_for("french")->artifact_id == "camembert-base");
  CHECK(registry.specialist_for("chinese")->artifact_id == "bert-base-chinese");
  CHECK(registry.specialist_for("portuguese")->artifact_id ==
        "neuralmind/bert-base-portuguese-cased");
  CHECK(registry.specialist_for("spanish")->artifact_id ==
        "daveni/twitter-xlm-roberta-emotion-es");
  CHECK(registry.specialist_for("italian")->artifact_id ==
        "dbmdz/bert-base-italian-xxl-uncased");

  for (const auto& spec : registry.members()) {
    const double expected = spec.kind == ModelKind::multilingual
                                ? kMultilingualLearningRate
                                : kLanguageSpecificLearningRate;
    CHECK(spec.learning_rate == expected);
  }
}

TEST_CASE("shipped registry file matches the built-in default") {
  const Registry built_in = default_registry();
  const Registry from_file =
      load_registry(std::filesystem::path(FIXTURES_DIR) / "registry_default.json");
  REQUIRE(from_file.members().size() == built_in.members().size());
  for (std::size_t i = 0; i < built_in.members().size(); ++i) {
    const auto& a = built_in.members()[i];
    const auto& b = from_file.members()[i];
    CHECK(a.id == b.id);
    CHECK(a.kind == b.kind);
    CHECK(a.language == b.language);
    CHECK(a.artifact_id == b.artifact_id);
    CHECK(a.learning_rate == b.learning_rate);
  }
}

TEST_CASE("registry validation rejects malformed member lists") {
  CHECK_THROWS_AS(Registry({}), ValidationError);

  // only specialists, no multilingual member
  CHECK_THROWS_AS(Registry({specialist_spec("fr", "french")}), ValidationError);

  // duplicate ids
  CHECK_THROWS_AS(
      Registry({multilingual_spec("m"), multilingual_spec("m")}),
      ValidationError);

  // two specialists for one language
  CHECK_THROWS_AS(Registry({multilingual_spec("m"),
                            specialist_spec("fr1", "french"),
                            specialist_spec("fr2", "french")}),
                  ValidationError);

  // missing artifact id
  CHECK_THROWS_AS(Registry({multilingual_spec("m", "")}), ValidationError);

  // specialist without a language
  ModelSpec no_lang = specialist_spec("x", "french");
  no_lang.language.reset();
  CHECK_THROWS_AS(Registry({multilingual_spec("m"), no_lang}), ValidationError);

  // multilingual member with a language
  ModelSpec lang_on_multi = multilingual_spec("m2");
  lang_on_multi.language = "french";
  CHECK_THROWS_AS(Registry({lang_on_multi}), ValidationError);

  // separator characters in ids would corrupt prediction files
  CHECK_THROWS_AS(Registry({multilingual_spec("bad=id")}), ValidationError);
  CHECK_THROWS_AS(Registry({multilingual_spec("bad;id")}), ValidationError);

  // non-positive learning rate
  ModelSpec bad_lr = multilingual_spec("m3");
  bad_lr.learning_rate = 0.0;
  CHECK_THROWS_AS(Registry({bad_lr}), ValidationError);
}

TEST_CASE("load_registry applies kind-specific learning rate defaults") {
  TempDir dir("registry");
  testutil::write_file(dir.file("r.json"), R"({
    "members": [
      {"id": "m", "kind": "multilingual", "artifact_id": "org/m"},
      {"id": "fr", "kind": "language_specific", "language": "French", "artifact_id": "org/fr"},
      {"id": "tuned", "kind": "multilingual", "artifact_id": "org/t", "learning_rate": 1e-5}
    ]
  })");
  const Registry registry = load_registry(dir.file("r.json"));
  CHECK(registry.find("m")->learning_rate == kMultilingualLearningRate);
  CHECK(registry.find("fr")->learning_rate == kLanguageSpecificLearningRate);
  CHECK(registry.find("fr")->language == "french");  // lowercased
  CHECK(registry.find("tuned")->learning_rate == 1e-5);

  CHECK_THROWS_AS(load_registry(dir.file("absent.json")), IoError);
  testutil::write_file(dir.file("bad.json"), "{not json");
  CHECK_THROWS_AS(load_registry(dir.file("bad.json")), ParseError);
  testutil::write_file(dir.file("nomembers.json"), R"({"foo": 1})");
  CHECK_THROWS_AS(load_registry(dir.file("nomembers.json")), ParseError);
}

TEST_CASE("registry save/load round trip") {
  const Registry registry = default_registry();
  TempDir dir("registry_rt");
  save_registry(dir.file("r.json"), registry);
  const Registry reloaded = load_registry(dir.file("r.json"));
  REQUIRE(reloaded.members().size() == registry.members().size());
  for (std::size_t i = 0; i < registry.members().size(); ++i) {
    CHECK(registry.members()[i].id == reloaded.members()[i].id);
    CHECK(registry.members()[i].artifact_id == reloaded.members()[i].artifact_id);
  }
}

TEST_CASE("resolve honors mode and language") {
  const Registry registry = default_registry();

  auto routed_fr = resolve("french", Mode::routed, registry);
  CHECK(ids(routed_fr) == std::vector<std::string>{"xlm-t", "xlm-roberta",
                                                   "mbert", "french-specialist"});

  auto routed_hi = resolve("hindi", Mode::routed, registry);
  CHECK(ids(routed_hi) == std::vector<std::string>{"xlm-t", "xlm-roberta", "mbert"});

  auto multi_zh = resolve("chinese", Mode::multilingual, registry);
  CHECK(ids(multi_zh) == std::vector<std::string>{"xlm-t", "xlm-roberta", "mbert"});
}

TEST_CASE("resolve in augmented mode routes unseen languages through English") {
  const Registry registry = default_registry();

  auto seen = resolve("italian", Mode::augmented, registry);
  CHECK(ids(seen) == std::vector<std::string>{"xlm-t", "xlm-roberta", "mbert"});

  auto unseen = resolve("korean", Mode::augmented, registry);
  CHECK(ids(unseen) == std::vector<std::string>{"xlm-t", "xlm-roberta", "mbert",
                                                "english-specialist"});
}

TEST_CASE("multilingual resolution is a prefix of routed resolution") {
  const Registry registry = default_registry();
  const std::vector<std::string> languages = {
      "english", "spanish", "portuguese", "italian", "french",
      "chinese", "hindi",   "dutch",      "korean",  "arabic",
      "klingon"};
  for (const auto& language : languages) {
    auto multi = resolve(language, Mode::multilingual, registry);
    auto routed = resolve(language, Mode::routed, registry);
    REQUIRE(routed.size() >= multi.size());
    for (std::size_t i = 0; i < multi.size(); ++i) {
      CHECK(multi[i].id == routed[i].id);
    }
    if (routed.size() > multi.size()) {
      CHECK(routed.back().kind == ModelKind::language_specific);
      CHECK(routed.back().language == language);
    }
    // order-stable across calls
    auto again = resolve(language, Mode::routed, registry);
    CHECK(ids(again) == ids(routed));
  }
}
