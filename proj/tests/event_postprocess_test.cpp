#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "clintime/event_extractor.hpp"
#include "test_util.hpp"

using namespace clintime;
using namespace clintime::events;
using clintime::crf::SchemaKind;

using Seq = std::vector<std::string>;

TEST_CASE("label fixer: boundary mark before an unopened I-run") {
  CHECK(label_fix({"O", "O", "O", "I", "I", "I", "I"}, SchemaKind::BIO) ==
        Seq{"O", "O", "B", "I", "I", "I", "I"});
}

TEST_CASE("label fixer: standalone B extends one token right") {
  CHECK(label_fix({"O", "O", "O", "B", "O", "O", "O"}, SchemaKind::BIO) ==
        Seq{"O", "O", "O", "B", "I", "O", "O"});
}

TEST_CASE("label fixer: gap between B and an I-run is bridged") {
  CHECK(label_fix({"O", "O", "O", "B", "O", "I", "I"}, SchemaKind::BIO) ==
        Seq{"O", "O", "O", "B", "I", "I", "I"});
}

TEST_CASE("label fixer: B splitting a run is absorbed") {
  CHECK(label_fix({"O", "O", "O", "B", "I", "I", "B", "I", "I"}, SchemaKind::BIO) ==
        Seq{"O", "O", "O", "B", "I", "I", "I", "I", "I"});
}

TEST_CASE("label fixer keeps adjacent mentions separate") {
  CHECK(label_fix({"B", "O", "B"}, SchemaKind::BIO) == Seq{"B", "O", "B"});
  CHECK(label_fix({"O", "B", "O"}, SchemaKind::BIO) == Seq{"O", "B", "O"});
}

TEST_CASE("label fixer output is schema-valid and idempotent on random input") {
  std::mt19937 rng(2024);
  const std::vector<std::string> bioLabels{"B", "I", "O"};
  const std::vector<std::string> wbioLabels{"B", "I", "O", "W"};
  for (int iter = 0; iter < 10000; ++iter) {
    bool wbio = iter % 2 == 0;
    const auto& alphabet = wbio ? wbioLabels : bioLabels;
    SchemaKind kind = wbio ? SchemaKind::WBIO : SchemaKind::BIO;
    crf::LabelSchema schema{kind, ""};
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    Seq seq(n);
    for (auto& l : seq)
      l = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    auto fixedOnce = label_fix(seq, kind);
    REQUIRE(schema.valid_sequence(fixedOnce));
    REQUIRE(label_fix(fixedOnce, kind) == fixedOnce);
  }
}

TEST_CASE("boundary adjustment absorbs adjacent noun-phrase tokens") {
  auto ad = testutil::analyzed("The patient had severe stomach ache yesterday .");
  auto cfg = PostprocessConfig::defaults();
  const auto& sent = ad.sentences[0];
  // "stomach" alone (token 4) grows over "severe" and "ache"
  auto adjusted = boundary_adjust({4, 5}, ad.tokens, sent, cfg);
  CHECK(adjusted.first <= 3);
  CHECK(adjusted.second >= 6);
  // never crosses the verb on the left or the period on the right
  CHECK(ad.tokens[adjusted.first].pos != "VBD");
  CHECK(ad.tokens[adjusted.second - 1].kind != TokenKind::Punctuation);
}

TEST_CASE("boundary adjustment is monotone, idempotent and sentence-bounded") {
  auto ad = testutil::analyzed("He developed acute renal failure after surgery .");
  auto cfg = PostprocessConfig::defaults();
  const auto& sent = ad.sentences[0];
  for (std::size_t a = sent.firstToken; a < sent.endToken; ++a) {
    crf::TokenRange r{a, a + 1};
    auto once = boundary_adjust(r, ad.tokens, sent, cfg);
    CHECK(once.first <= r.first);
    CHECK(once.second >= r.second);
    CHECK(once.first >= sent.firstToken);
    CHECK(once.second <= sent.endToken);
    CHECK(boundary_adjust(once, ad.tokens, sent, cfg) == once);
  }
}

TEST_CASE("false-positive filter drops pronouns and single characters") {
  std::string text = "He has a headache";
  auto cfg = PostprocessConfig::defaults();
  std::vector<EventMention> ms;
  ms.push_back({"E1", {0, 2}, EventCategory::Problem, false});   // "He"
  ms.push_back({"E2", {7, 8}, EventCategory::Problem, false});   // "a"
  ms.push_back({"E3", {9, 17}, EventCategory::Problem, false});  // "headache"
  auto out = fp_filter(ms, text, cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "E3");
}

TEST_CASE("negation: forward trigger marks events inside its scope") {
  auto ad = testutil::analyzed("The patient denied chest pain or fever .");
  std::vector<EventMention> ms;
  ms.push_back({"E1", {19, 29}, EventCategory::Problem, false});  // chest pain
  detect_negation(ms, ad.tokens, ad.sentences[0], NegationConfig::defaults());
  CHECK(ms[0].negated);
}

TEST_CASE("negation: events outside the trigger scope stay positive") {
  auto ad = testutil::analyzed("She denied fever but reported swelling today .");
  std::vector<EventMention> ms;
  std::size_t sw = ad.doc.text.find("swelling");
  ms.push_back({"E1", {static_cast<std::int64_t>(sw), static_cast<std::int64_t>(sw + 8)},
                EventCategory::Problem, false});
  detect_negation(ms, ad.tokens, ad.sentences[0], NegationConfig::defaults());
  CHECK_FALSE(ms[0].negated);  // "but" terminates the scope
}

TEST_CASE("negation rules load from lexicon files") {
  auto cfg = NegationConfig::load(testutil::data_path("negation_triggers.tsv"),
                                  testutil::data_path("negation_terminators.txt"));
  CHECK_FALSE(cfg.rules.empty());
  CHECK_FALSE(cfg.terminators.empty());
  auto ad = testutil::analyzed("There was no evidence of pneumonia .");
  std::vector<EventMention> ms;
  std::size_t p = ad.doc.text.find("pneumonia");
  ms.push_back({"E1", {static_cast<std::int64_t>(p), static_cast<std::int64_t>(p + 9)},
                EventCategory::Problem, false});
  detect_negation(ms, ad.tokens, ad.sentences[0], cfg);
  CHECK(ms[0].negated);
}
