#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "clintime/pipeline.hpp"
#include "clintime/standoff.hpp"

using namespace clintime;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitThreshold = 3;

int run_train(const std::string& configPath, const std::string& corpusDir) {
  pipeline::PipelineConfig cfg = pipeline::PipelineConfig::load(configPath);
  pipeline::TrainSummary s = pipeline::cmd_train(cfg, corpusDir);
  for (const auto& [name, obj] : s.finalObjective)
    std::printf("%s: objective %.6f, %zu features\n", name.c_str(), obj, s.featureCounts.at(name));
  return kExitOk;
}

int run_tag(const std::string& configPath, const std::string& inputDir,
            const std::string& outputDir, int workers) {
  pipeline::PipelineConfig cfg = pipeline::PipelineConfig::load(configPath);
  if (workers > 0) cfg.workers = workers;
  pipeline::TagSummary s = pipeline::cmd_tag(cfg, inputDir, outputDir);
  std::printf("wrote %zu documents", s.written);
  if (!s.quarantined.empty()) std::printf(", quarantined %zu", s.quarantined.size());
  std::printf("\n");
  for (const auto& [doc, err] : s.quarantined)
    std::fprintf(stderr, "quarantined %s: %s\n", doc.c_str(), err.c_str());
  return kExitOk;
}

int run_eval(const std::string& goldDir, const std::string& sysDir, const std::string& subset,
             const std::string& kvFile, double minEventF1, double minPrimary,
             double minTlinkF1) {
  pipeline::TlinkSubset sub = pipeline::TlinkSubset::All;
  if (subset == "sectime") sub = pipeline::TlinkSubset::Sectime;
  else if (subset == "intra") sub = pipeline::TlinkSubset::Intra;
  else if (subset == "inter") sub = pipeline::TlinkSubset::Inter;
  else if (!subset.empty() && subset != "all") {
    std::fprintf(stderr, "unknown --tlink-subset value '%s'\n", subset.c_str());
    return kExitUsage;
  }
  eval::EvalReport report = pipeline::cmd_eval(goldDir, sysDir, sub);
  std::fputs(report.table().c_str(), stdout);
  if (!kvFile.empty()) {
    std::ofstream out(kvFile);
    for (const auto& [k, v] : report.key_values()) out << k << "=" << v << "\n";
  }
  bool violated = false;
  violated |= minEventF1 >= 0 && report.eventStrict.at("micro").f1 < minEventF1;
  violated |= minPrimary >= 0 && report.tern.primary < minPrimary;
  violated |= minTlinkF1 >= 0 && report.tlinkCustomary.f1 < minTlinkF1;
  return violated ? kExitThreshold : kExitOk;
}

int run_timeline(const std::string& inputFile, const std::string& csvFile) {
  AnnotatedDocument ad = standoff::read_file(inputFile);
  pipeline::Timeline tl = pipeline::cmd_timeline(ad);
  for (const auto& note : tl.notes) std::fprintf(stderr, "note: %s\n", note.c_str());
  std::FILE* out = stdout;
  std::FILE* csv = nullptr;
  if (!csvFile.empty()) {
    csv = std::fopen(csvFile.c_str(), "w");
    if (!csv) {
      std::fprintf(stderr, "cannot open %s\n", csvFile.c_str());
      return kExitData;
    }
  }
  std::fprintf(out, "%-8s %-30s %-12s %s\n", "anchor", "surface", "date", "vs-DCT");
  if (csv) std::fprintf(csv, "anchor,surface,date,relation_to_dct\n");
  for (const auto& row : tl.rows) {
    const std::string date = row.resolvedDate.value_or("-");
    std::fprintf(out, "%-8s %-30s %-12s %s\n", row.anchorId.c_str(), row.surface.c_str(),
                 date.c_str(), row.relationToDct.c_str());
    if (csv)
      std::fprintf(csv, "%s,\"%s\",%s,%s\n", row.anchorId.c_str(), row.surface.c_str(),
                   date.c_str(), row.relationToDct.c_str());
  }
  if (csv) std::fclose(csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clinical temporal-ordering pipeline"};
  app.require_subcommand(1);

  std::string configPath, corpusDir, inputDir, outputDir, goldDir, sysDir;
  std::string subset, kvFile, inputFile, csvFile;
  int workers = 0;
  double minEventF1 = -1, minPrimary = -1, minTlinkF1 = -1;
  pipeline::SyntheticOptions synOpt;
  std::string synOut;

  auto* train = app.add_subcommand("train", "train the sequence models");
  train->add_option("--config", configPath)->required();
  train->add_option("--corpus", corpusDir)->required();

  auto* tag = app.add_subcommand("tag", "annotate a directory of documents");
  tag->add_option("--config", configPath)->required();
  tag->add_option("--input", inputDir)->required();
  tag->add_option("--output", outputDir)->required();
  tag->add_option("--workers", workers);

  auto* ev = app.add_subcommand("eval", "score system output against gold");
  ev->add_option("--gold", goldDir)->required();
  ev->add_option("--sys", sysDir)->required();
  ev->add_option("--tlink-subset", subset, "all|sectime|intra|inter");
  ev->add_option("--kv", kvFile, "write machine-readable scores here");
  ev->add_option("--min-event-f1", minEventF1);
  ev->add_option("--min-primary", minPrimary);
  ev->add_option("--min-tlink-f1", minTlinkF1);

  auto* tl = app.add_subcommand("timeline", "order events from a tagged document");
  tl->add_option("--input", inputFile)->required();
  tl->add_option("--csv", csvFile);

  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic gold corpus");
  gen->add_option("--output", synOut)->required();
  gen->add_option("--documents", synOpt.documents);
  gen->add_option("--sentences", synOpt.sentencesPerDocument);
  gen->add_option("--seed", synOpt.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return run_train(configPath, corpusDir);
    if (*tag) return run_tag(configPath, inputDir, outputDir, workers);
    if (*ev) return run_eval(goldDir, sysDir, subset, kvFile, minEventF1, minPrimary, minTlinkF1);
    if (*tl) return run_timeline(inputFile, csvFile);
    if (*gen) {
      pipeline::gen_synthetic(synOut, synOpt);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
