#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "clintime/pipeline.hpp"
#include "clintime/standoff.hpp"
#include "test_util.hpp"

using namespace clintime;
using namespace clintime::pipeline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

PipelineConfig bundled_config() {
  return PipelineConfig::load(testutil::data_path("pipeline.conf"));
}

}  // namespace

TEST_CASE("bundled configuration loads with resolved paths") {
  auto cfg = bundled_config();
  CHECK(fs::exists(cfg.lexiconDir));
  CHECK(fs::exists(cfg.terRules));
  CHECK(cfg.stageEvents);
  CHECK(cfg.stageTern);
  CHECK(cfg.stageTlink);
  CHECK_FALSE(cfg.closure);
  CHECK(cfg.schemaByCategory.at("Test") == crf::SchemaKind::WBIO);
  CHECK(cfg.schemaByCategory.at("Problem") == crf::SchemaKind::BIO);
  CHECK(cfg.workers == 1);
  CHECK(cfg.corefThreshold == doctest::Approx(0.8));
}

TEST_CASE("configuration include and overrides") {
  testutil::TempDir tmp("clintime-pipeline");
  spit(tmp.str("derived.conf"),
       "include " + testutil::data_path("pipeline.conf") + "\n"
       "workers = 3\n"
       "closure = on\n");
  auto cfg = PipelineConfig::load(tmp.str("derived.conf"));
  CHECK(cfg.workers == 3);
  CHECK(cfg.closure);
  CHECK(fs::exists(cfg.lexiconDir));  // inherited from the included file
}

TEST_CASE("configuration errors are reported with file and line") {
  testutil::TempDir tmp("clintime-pipeline");
  spit(tmp.str("bad1.conf"), "no_such_key = 1\n");
  CHECK_THROWS_AS(PipelineConfig::load(tmp.str("bad1.conf")), ConfigError);
  spit(tmp.str("bad2.conf"), "closure maybe\n");
  CHECK_THROWS_AS(PipelineConfig::load(tmp.str("bad2.conf")), ConfigError);
  spit(tmp.str("bad3.conf"), "closure = maybe\n");
  CHECK_THROWS_AS(PipelineConfig::load(tmp.str("bad3.conf")), ConfigError);
  spit(tmp.str("bad4.conf"), "schema_problem = XYZ\n");
  CHECK_THROWS_AS(PipelineConfig::load(tmp.str("bad4.conf")), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::load(tmp.str("missing.conf")), ConfigError);
}

TEST_CASE("synthetic corpus generation is deterministic per seed") {
  testutil::TempDir tmp("clintime-pipeline");
  SyntheticOptions opt{3, 4, 7};
  gen_synthetic(tmp.str("a"), opt);
  gen_synthetic(tmp.str("b"), opt);
  int files = 0;
  for (const auto& e : fs::directory_iterator(tmp.str("a"))) {
    const std::string name = e.path().filename().string();
    CHECK(slurp(tmp.str("a/" + name)) == slurp(tmp.str("b/" + name)));
    ++files;
  }
  CHECK(files == 3);

  SyntheticOptions other{3, 4, 8};
  gen_synthetic(tmp.str("c"), other);
  bool anyDiff = false;
  for (const auto& e : fs::directory_iterator(tmp.str("a"))) {
    const std::string name = e.path().filename().string();
    anyDiff = anyDiff || slurp(tmp.str("a/" + name)) != slurp(tmp.str("c/" + name));
  }
  CHECK(anyDiff);
}

TEST_CASE("synthetic documents are valid standoff with gold links") {
  auto docs = synthetic_corpus({2, 6, 13});
  REQUIRE(docs.size() == 2);
  for (const auto& ad : docs) {
    CHECK(ad.doc.meta.count("dct") == 1);
    CHECK_FALSE(ad.events.empty());
    CHECK_FALSE(ad.tlinks.empty());
    standoff::validate(ad);  // throws on inconsistency
  }
}

TEST_CASE("training refuses an empty corpus") {
  testutil::TempDir tmp("clintime-pipeline");
  fs::create_directories(tmp.str("empty"));
  auto cfg = bundled_config();
  cfg.modelDir = tmp.str("models");
  CHECK_THROWS_AS(cmd_train(cfg, tmp.str("empty")), EmptyCorpus);
}

TEST_CASE("tagging quarantines malformed inputs and processes the rest") {
  testutil::TempDir tmp("clintime-pipeline");
  gen_synthetic(tmp.str("in"), {3, 3, 21});
  spit(tmp.str("in/broken.ann"), "#DOC broken\nthis is not a standoff file\n");

  auto cfg = bundled_config();
  cfg.modelDir.clear();  // rule-only tagging: no trained models needed
  auto summary = cmd_tag(cfg, tmp.str("in"), tmp.str("out"));

  CHECK(summary.written == 3);
  REQUIRE(summary.quarantined.size() == 1);
  CHECK(summary.quarantined[0].first == "broken.ann");
  CHECK(slurp(tmp.str("out/errors.log")).find("broken.ann") != std::string::npos);
  CHECK(fs::exists(tmp.str("out/SYN-0001.ann")));
  CHECK_FALSE(fs::exists(tmp.str("out/broken.ann")));

  // rule-only outputs still carry recognized, normalized timexes
  auto tagged = standoff::read_file(tmp.str("out/SYN-0001.ann"));
  bool anyResolved = false;
  for (const auto& t : tagged.timexes) anyResolved = anyResolved || t.value != "UNK";
  CHECK(anyResolved);
}

TEST_CASE("evaluation of a corpus against itself is perfect, with link subsets") {
  testutil::TempDir tmp("clintime-pipeline");
  gen_synthetic(tmp.str("gold"), {3, 5, 5});
  auto all = cmd_eval(tmp.str("gold"), tmp.str("gold"), TlinkSubset::All);
  CHECK(all.eventStrict.at("micro").f1 == doctest::Approx(1.0));
  CHECK(all.tern.primary == doctest::Approx(1.0));
  CHECK(all.tlinkCustomary.f1 == doctest::Approx(1.0));
  CHECK(all.tlinkTempEval3.f1 == doctest::Approx(1.0));

  auto sectime = cmd_eval(tmp.str("gold"), tmp.str("gold"), TlinkSubset::Sectime);
  CHECK(sectime.tlinkCustomary.f1 == doctest::Approx(1.0));
  CHECK(sectime.tlinkCustomary.tp <= all.tlinkCustomary.tp);
  auto intra = cmd_eval(tmp.str("gold"), tmp.str("gold"), TlinkSubset::Intra);
  CHECK(intra.tlinkCustomary.tp + sectime.tlinkCustomary.tp == all.tlinkCustomary.tp);
}

TEST_CASE("timeline orders events by resolved date and reports the creation-time relation") {
  AnnotatedDocument ad;
  ad.doc.id = "t";
  ad.doc.text = "aspirin then surgery";
  ad.doc.meta["dct"] = "2012-03-10";
  ad.events.push_back({"E1", {0, 7}, EventCategory::Treatment, false});
  ad.events.push_back({"E2", {13, 20}, EventCategory::Treatment, false});
  ad.timexes.push_back({"T1", {0, 7}, TimexType::Date, "2012-03-01", TimexModifier::NA});
  ad.tlinks.push_back({"L1", "E1", "T1", Relation::Overlap, LinkOrigin::Prepositional});
  ad.tlinks.push_back({"L2", "E1", "ST-DCT", Relation::Before, LinkOrigin::Sectime});
  ad.tlinks.push_back({"L3", "E2", "ST-DCT", Relation::Overlap, LinkOrigin::Sectime});

  auto tl = cmd_timeline(ad);
  REQUIRE(tl.rows.size() == 2);
  CHECK(tl.notes.empty());
  CHECK(tl.rows[0].anchorId == "E1");  // dated rows come first
  REQUIRE(tl.rows[0].resolvedDate.has_value());
  CHECK(*tl.rows[0].resolvedDate == "2012-03-01");
  CHECK(tl.rows[0].relationToDct == "Before");
  CHECK(tl.rows[1].relationToDct == "Overlap");

  // a cycle through X: closure derives ST-DCT before E1 against E1 before ST-DCT
  ad.tlinks.push_back({"L4", "ST-DCT", "X", Relation::Before, LinkOrigin::Other});
  ad.tlinks.push_back({"L5", "X", "E1", Relation::Before, LinkOrigin::Other});
  auto conflicted = cmd_timeline(ad);
  CHECK_FALSE(conflicted.notes.empty());
}
