#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "clintime/eval.hpp"
#include "clintime/stringsim.hpp"
#include "clintime/text.hpp"
#include "clintime/tlink.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace clintime;
using namespace clintime::tlink;

namespace {

const std::vector<IntraRule>& rules() {
  static const std::vector<IntraRule> r = load_intra_rules(testutil::data_path("intra_rules.tsv"));
  return r;
}

Span span_of(const AnnotatedDocument& ad, const std::string& surface) {
  std::size_t at = ad.doc.text.find(surface);
  REQUIRE(at != std::string::npos);
  auto start = static_cast<std::int64_t>(text::codepoint_length(ad.doc.text.substr(0, at)));
  return {start, start + static_cast<std::int64_t>(text::codepoint_length(surface))};
}

struct Fixture {
  AnnotatedDocument ad;
  explicit Fixture(const std::string& sentence) : ad(testutil::analyzed(sentence)) {}
  Fixture& event(const std::string& surface, EventCategory c) {
    ad.events.push_back({"E" + std::to_string(ad.events.size() + 1), span_of(ad, surface), c, false});
    return *this;
  }
  Fixture& timex(const std::string& surface, TimexType t) {
    ad.timexes.push_back({"T" + std::to_string(ad.timexes.size() + 1), span_of(ad, surface), t, "", TimexModifier::NA});
    return *this;
  }
  std::vector<TLink> intra() const { return extract_intra(ad, rules()); }
};

bool has_link(const std::vector<TLink>& links, const std::string& s, const std::string& t,
              Relation r) {
  for (const auto& l : links)
    if (l.source == s && l.target == t && l.relation == r) return true;
  return false;
}

}  // namespace

TEST_CASE("intra rule line parsing") {
  auto r = parse_intra_rule_line("R99\tPrepositional\tTREATMENT\tfor\tPROBLEM\tBefore\tlr\t3");
  CHECK(r.id == "R99");
  CHECK(r.kind == RuleKind::Prepositional);
  CHECK(r.connector == std::vector<std::string>{"for"});
  CHECK(r.relation == Relation::Before);
  CHECK(r.maxTokenDistance == 3);
  CHECK_THROWS_AS(parse_intra_rule_line("R1\tPrepositional\tA\tfor\tB\tBefore\tlr"), ParseError);
  CHECK_THROWS_AS(parse_intra_rule_line("R1\tBogus\tA\tfor\tB\tBefore\tlr\t3"), ParseError);
  CHECK_THROWS_AS(parse_intra_rule_line("R1\tPrepositional\tA\t-\tB\tBefore\tlr\t3"), ParseError);
  CHECK_THROWS_AS(parse_intra_rule_line("R1\tOther\tA\t-\tB\tBefore\txx\t3"), ParseError);
}

TEST_CASE("coordinated problems overlap: and / comma / or") {
  {
    auto links = Fixture("He reported vomiting and nausea .")
                     .event("vomiting", EventCategory::Problem)
                     .event("nausea", EventCategory::Problem)
                     .intra();
    REQUIRE(links.size() == 1);
    CHECK(has_link(links, "E1", "E2", Relation::Overlap));
    CHECK(links[0].origin == LinkOrigin::Coordinate);
  }
  {
    auto links = Fixture("He reported vomiting , nausea .")
                     .event("vomiting", EventCategory::Problem)
                     .event("nausea", EventCategory::Problem)
                     .intra();
    CHECK(has_link(links, "E1", "E2", Relation::Overlap));
  }
  {
    auto links = Fixture("He reported vomiting or nausea .")
                     .event("vomiting", EventCategory::Problem)
                     .event("nausea", EventCategory::Problem)
                     .intra();
    CHECK(has_link(links, "E1", "E2", Relation::Overlap));
  }
}

TEST_CASE("treatment or problem anchored to a date") {
  {
    auto links = Fixture("He started aspirin on Monday .")
                     .event("aspirin", EventCategory::Treatment)
                     .timex("Monday", TimexType::Date)
                     .intra();
    REQUIRE(links.size() == 1);
    CHECK(has_link(links, "E1", "T1", Relation::Overlap));
    CHECK(links[0].origin == LinkOrigin::Prepositional);
  }
  {
    auto links = Fixture("He started aspirin in June .")
                     .event("aspirin", EventCategory::Treatment)
                     .timex("June", TimexType::Date)
                     .intra();
    CHECK(has_link(links, "E1", "T1", Relation::Overlap));
  }
  {
    auto links = Fixture("He had swelling in 2006 .")
                     .event("swelling", EventCategory::Problem)
                     .timex("2006", TimexType::Date)
                     .intra();
    CHECK(has_link(links, "E1", "T1", Relation::Overlap));
  }
}

TEST_CASE("treatment before the problem it addresses") {
  {
    auto links = Fixture("He received steroids for his swelling .")
                     .event("steroids", EventCategory::Treatment)
                     .event("swelling", EventCategory::Problem)
                     .intra();
    REQUIRE(links.size() == 1);
    CHECK(has_link(links, "E1", "E2", Relation::Before));
  }
  {
    auto links = Fixture("He underwent resection of the tumor .")
                     .event("resection", EventCategory::Treatment)
                     .event("tumor", EventCategory::Problem)
                     .intra();
    CHECK(has_link(links, "E1", "E2", Relation::Before));
  }
}

TEST_CASE("after-connector patterns") {
  {
    auto links = Fixture("She developed nausea after chemotherapy .")
                     .event("nausea", EventCategory::Problem)
                     .event("chemotherapy", EventCategory::Treatment)
                     .intra();
    REQUIRE(links.size() == 1);
    CHECK(has_link(links, "E1", "E2", Relation::After));
  }
  {
    auto links = Fixture("She began therapy post biopsy .")
                     .event("therapy", EventCategory::Treatment)
                     .event("biopsy", EventCategory::Test)
                     .intra();
    CHECK(has_link(links, "E1", "E2", Relation::After));
  }
}

TEST_CASE("test-result patterns run before the finding") {
  {
    auto links = Fixture("The MRI showed edema .")
                     .event("MRI", EventCategory::Test)
                     .event("edema", EventCategory::Problem)
                     .intra();
    REQUIRE(links.size() == 1);
    CHECK(has_link(links, "E1", "E2", Relation::Before));
    CHECK(links[0].origin == LinkOrigin::Other);
  }
  {
    auto links = Fixture("The biopsy revealed carcinoma .")
                     .event("biopsy", EventCategory::Test)
                     .event("carcinoma", EventCategory::Problem)
                     .intra();
    CHECK(has_link(links, "E1", "E2", Relation::Before));
  }
}

TEST_CASE("no link without a matching connector or within distance") {
  auto links = Fixture("He reported vomiting but denied nausea today at home sometimes .")
                   .event("vomiting", EventCategory::Problem)
                   .event("nausea", EventCategory::Problem)
                   .intra();
  CHECK(links.empty());
}

TEST_CASE("two-sentence narrative yields exactly six links under closure") {
  Fixture f(
      "The patient reported vomiting , nausea and headaches . "
      "The patient received steroids for his swelling in 2006 .");
  f.event("vomiting", EventCategory::Problem)
      .event("nausea", EventCategory::Problem)
      .event("headaches", EventCategory::Problem)
      .event("steroids", EventCategory::Treatment)
      .event("swelling", EventCategory::Problem)
      .timex("2006", TimexType::Date);

  TlinkConfig cfg;
  cfg.intraRules = rules();
  cfg.closure = true;
  std::vector<std::string> warnings;
  auto links = extract_all(f.ad, cfg, &warnings);

  REQUIRE(links.size() == 6);
  CHECK(has_link(links, "E1", "E2", Relation::Overlap));  // vomiting , nausea
  CHECK(has_link(links, "E2", "E3", Relation::Overlap));  // nausea and headaches
  CHECK(has_link(links, "E1", "E3", Relation::Overlap));  // derived
  CHECK(has_link(links, "E4", "E5", Relation::Before));   // steroids for swelling
  CHECK(has_link(links, "E5", "T1", Relation::Overlap));  // swelling in 2006
  CHECK(has_link(links, "E4", "T1", Relation::Before));   // derived
}

TEST_CASE("section detection and section-time links") {
  Fixture f(
      "History of Present Illness: The patient had a fever .\n"
      "Hospital Course: The fever resolved after antibiotics .");
  f.ad.doc.meta["admission"] = "2012-03-01";
  f.ad.doc.meta["discharge"] = "2012-03-10";
  f.event("a fever", EventCategory::Problem);          // HPI section
  f.event("antibiotics", EventCategory::Treatment);    // hospital course

  SectionConfig cfg =
      SectionConfig::load(testutil::data_path("sections.txt"),
                          testutil::data_path("routine_measurements.txt"));
  detect_sections(f.ad, cfg);
  REQUIRE(f.ad.sections.size() == 2);
  CHECK(f.ad.sections[0].first == kStAdmission);
  CHECK(f.ad.sections[1].first == kStDischarge);

  auto links = extract_sectime(f.ad, cfg);
  REQUIRE(links.size() == 2);
  CHECK(has_link(links, "E1", kStAdmission, Relation::Before));
  CHECK(has_link(links, "E2", kStDischarge, Relation::Before));
  for (const auto& l : links) CHECK(l.origin == LinkOrigin::Sectime);
}

TEST_CASE("with only a creation date every event anchors to the creation time") {
  Fixture f("The blood pressure was stable and the rash improved .");
  f.ad.doc.meta["dct"] = "2012-03-10";
  f.event("blood pressure", EventCategory::Test);
  f.event("rash", EventCategory::Problem);

  auto links = extract_sectime(f.ad, SectionConfig::defaults());
  REQUIRE(links.size() == 2);
  CHECK(has_link(links, "E1", kStDct, Relation::Overlap));  // routine measurement
  CHECK(has_link(links, "E2", kStDct, Relation::Before));
}

TEST_CASE("documents without any anchor date are reported") {
  Fixture f("The rash improved .");
  f.event("rash", EventCategory::Problem);
  CHECK_THROWS_AS(extract_sectime(f.ad, SectionConfig::defaults()), MissingAnchorDate);
}

TEST_CASE("coreference links only pairs at or above the similarity threshold") {
  Fixture f("He noted facial swelling . Later the facial swellings worsened . He denied chest pain .");
  f.event("facial swelling", EventCategory::Problem)
      .event("facial swellings", EventCategory::Problem)
      .event("chest pain", EventCategory::Problem);

  auto stats = strsim::build_stats(
      {"facial swelling", "facial swellings", "chest pain", "fever", "cough"});
  auto links = extract_coref(f.ad, stats, 0.8);
  REQUIRE(links.size() == 1);
  CHECK(has_link(links, "E1", "E2", Relation::Overlap));
  CHECK(links[0].origin == LinkOrigin::Coref);

  // an impossible threshold produces nothing
  CHECK(extract_coref(f.ad, stats, 1.1).empty());
}

TEST_CASE("temporal graph invariants") {
  TemporalGraph g;
  CHECK_FALSE(g.add("A", "A", Relation::Before));  // self loop
  CHECK(g.add("A", "B", Relation::Before));
  CHECK_FALSE(g.add("B", "A", Relation::Before));  // contradiction
  CHECK_FALSE(g.add("A", "B", Relation::After));   // same contradiction, inverted
  CHECK(g.has("A", "B", Relation::Before));
  CHECK(g.has("B", "A", Relation::After));

  CHECK(g.add("D", "C", Relation::After));  // stored as C before D, flagged
  auto edges = g.edges();
  CHECK(std::count(edges.begin(), edges.end(),
                   std::tuple<std::string, std::string, Relation>{"D", "C", Relation::After}) == 1);

  CHECK(g.add("E", "D", Relation::Overlap));
  CHECK(g.has("D", "E", Relation::Overlap));  // symmetric
  CHECK(g.overlap_edges().count({"D", "E"}) == 1);  // canonical orientation
}

TEST_CASE("each composition rule derives the expected edge") {
  auto closed = [](std::initializer_list<std::tuple<const char*, const char*, Relation>> in) {
    TemporalGraph g;
    for (auto [s, t, r] : in) REQUIRE(g.add(s, t, r));
    return transitive_closure(g).graph;
  };
  using R = Relation;
  CHECK(closed({{"A", "B", R::Before}, {"B", "C", R::Before}}).has("A", "C", R::Before));
  CHECK(closed({{"C", "B", R::After}, {"B", "A", R::After}}).has("C", "A", R::After));
  CHECK(closed({{"A", "B", R::Overlap}, {"B", "C", R::Overlap}}).has("A", "C", R::Overlap));
  CHECK(closed({{"A", "B", R::Before}, {"B", "C", R::Overlap}}).has("A", "C", R::Before));
  CHECK(closed({{"A", "B", R::Before}, {"A", "C", R::Overlap}}).has("C", "B", R::Before));
}

TEST_CASE("a derived edge contradicting an existing one is recorded, not added") {
  TemporalGraph g;
  REQUIRE(g.add("A", "B", Relation::Before));
  REQUIRE(g.add("B", "C", Relation::Before));
  REQUIRE(g.add("C", "A", Relation::Before));
  auto res = transitive_closure(g);
  CHECK_FALSE(res.conflicts.empty());
  // the originals survive
  CHECK(res.graph.has("A", "B", Relation::Before));
  CHECK(res.graph.has("B", "C", Relation::Before));
  CHECK(res.graph.has("C", "A", Relation::Before));
}

TEST_CASE("closure agrees with an independent matrix fixpoint") {
  std::mt19937 rng(20260826);
  for (int i = 0; i < 300; ++i) {
    auto g = oracles::random_graph(rng);
    auto res = transitive_closure(g);
    auto got = oracles::sets_of(res.graph);
    got.conflicts.insert(res.conflicts.begin(), res.conflicts.end());
    auto want = oracles::brute_force_closure(g);
    CHECK(got == want);
  }
}

TEST_CASE("closure is idempotent") {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    auto once = transitive_closure(oracles::random_graph(rng)).graph;
    auto twice = transitive_closure(once).graph;
    CHECK(oracles::sets_of(once) == oracles::sets_of(twice));
  }
}

TEST_CASE("closure is monotone on conflict-free graphs") {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto g = oracles::random_conflict_free_graph(rng);
    auto base = oracles::sets_of(transitive_closure(g).graph);
    auto bigger = g;
    bigger.add("X0", "X1", Relation::Before);  // fresh nodes: still conflict-free
    auto grown = oracles::sets_of(transitive_closure(bigger).graph);
    for (const auto& e : base.before) CHECK(grown.before.count(e) == 1);
    for (const auto& e : base.overlap) CHECK(grown.overlap.count(e) == 1);
  }
}

TEST_CASE("link extraction assigns sequential ids and dedups across stages") {
  Fixture f("He reported vomiting and nausea .");
  f.ad.doc.meta["dct"] = "2012-03-10";
  f.event("vomiting", EventCategory::Problem).event("nausea", EventCategory::Problem);
  TlinkConfig cfg;
  cfg.intraRules = rules();
  auto links = extract_all(f.ad, cfg);
  REQUIRE(links.size() == 3);  // 1 coordination + 2 section-time
  for (std::size_t i = 0; i < links.size(); ++i)
    CHECK(links[i].id == "L" + std::to_string(i + 1));
}
