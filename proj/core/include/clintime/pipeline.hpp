#ifndef CLINTIME_PIPELINE_HPP
#define CLINTIME_PIPELINE_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clintime/crf.hpp"
#include "clintime/eval.hpp"
#include "clintime/event_extractor.hpp"
#include "clintime/preproc.hpp"
#include "clintime/tern.hpp"
#include "clintime/tlink.hpp"
#include "clintime/types.hpp"

namespace clintime::pipeline {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& file, int line, const std::string& reason)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + reason) {}
};

struct EmptyCorpus : std::runtime_error {
  EmptyCorpus() : std::runtime_error("corpus contains no documents") {}
};

// Plain key=value configuration; '#' comments; `include <path>` pulls in
// another file; relative paths resolve against the containing file.
struct PipelineConfig {
  // data paths
  std::string lexiconDir;
  std::string eventTemplates;
  std::string terTemplates;
  std::string terRules;
  std::string intraRules;
  std::string sectionLexicon;
  std::string routineLexicon;
  std::string fpLexicon;
  std::string negationTriggers;
  std::string negationTerminators;
  std::string modelDir;

  // stage toggles
  bool stageEvents = true;
  bool stageTern = true;
  bool stageTlink = true;
  bool closure = false;

  // postprocess toggles
  bool labelFixer = true;
  bool boundaryAdjust = true;
  bool fpFilter = true;
  bool negation = true;

  std::map<std::string, crf::SchemaKind> schemaByCategory = {
      {"Problem", crf::SchemaKind::BIO},
      {"Treatment", crf::SchemaKind::BIO},
      {"Test", crf::SchemaKind::WBIO}};
  crf::SchemaKind terSchema = crf::SchemaKind::IO;

  int workers = 1;
  double corefThreshold = 0.8;
  crf::Hyper hyper;

  static PipelineConfig load(const std::string& path);
};

// Immutable once loaded; shared across the worker pool.
struct Pipeline {
  PipelineConfig cfg;
  preproc::Gazetteer gazetteer;
  std::unique_ptr<preproc::PosTagger> tagger;
  events::CategoryModels eventModels;
  events::PostprocessConfig postprocess;
  events::NegationConfig negationCfg;
  std::optional<crf::CrfModel> terModel;
  std::vector<tern::TerRule> terRules;
  std::vector<crf::FeatureTemplate> eventTemplates;
  std::vector<crf::FeatureTemplate> terTemplates;
  tlink::TlinkConfig tlinkCfg;

  // Models optional so tag can run rule-only when none are trained yet.
  static Pipeline load(const PipelineConfig& cfg, bool requireModels);

  // events + tern on one document (no tlink; coref stats are batch-scoped)
  void annotate_entities(AnnotatedDocument& ad) const;
  void annotate_links(AnnotatedDocument& ad,
                      const strsim::TfidfCorpusStats* stats,
                      std::vector<std::string>* warnings) const;
};

struct TrainSummary {
  std::map<std::string, double> finalObjective;  // per model name
  std::map<std::string, std::size_t> featureCounts;
};
TrainSummary cmd_train(const PipelineConfig& cfg, const std::string& corpusDir);

struct TagSummary {
  std::size_t written = 0;
  std::vector<std::pair<std::string, std::string>> quarantined;  // (doc, error)
};
TagSummary cmd_tag(const PipelineConfig& cfg, const std::string& inputDir,
                   const std::string& outputDir);

enum class TlinkSubset { All, Sectime, Intra, Inter };
eval::EvalReport cmd_eval(const std::string& goldDir, const std::string& sysDir,
                          TlinkSubset subset = TlinkSubset::All);

struct TimelineRow {
  std::string anchorId;
  std::string surface;
  std::optional<std::string> resolvedDate;  // ISO-8601
  std::string relationToDct;                // Before/After/Overlap/Unknown
};

struct Timeline {
  std::vector<TimelineRow> rows;
  std::vector<std::string> notes;  // e.g. cyclic-conflict fallback
};
Timeline cmd_timeline(const AnnotatedDocument& tagged);

// ---- Synthetic corpus ----

struct SyntheticOptions {
  int documents = 50;
  int sentencesPerDocument = 10;
  unsigned seed = 42;
};

// Template-generated clinical-style documents with gold events, timexes,
// and links; deterministic for a fixed seed.
std::vector<AnnotatedDocument> synthetic_corpus(const SyntheticOptions& opt);
void gen_synthetic(const std::string& outDir, const SyntheticOptions& opt);

}  // namespace clintime::pipeline

#endif
