#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "clintime/pipeline.hpp"
#include "clintime/standoff.hpp"
#include "clintime/text.hpp"

namespace fs = std::filesystem;

namespace clintime::pipeline {

namespace {

bool parse_bool(const std::string& v, const std::string& file, int line) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(file, line, "expected boolean, got '" + v + "'");
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base).parent_path() / p).lexically_normal().string();
}

void load_config_into(PipelineConfig& cfg, const std::string& path, int depth) {
  if (depth > 8) throw ConfigError(path, 0, "include chain too deep");
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("include ", 0) == 0) {
      load_config_into(cfg, resolve(path, text::trim(t.substr(8))), depth + 1);
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(path, ln, "expected key=value");
    std::string key = text::trim(t.substr(0, eq));
    std::string val = text::trim(t.substr(eq + 1));
    if (key == "lexicon_dir") cfg.lexiconDir = resolve(path, val);
    else if (key == "event_templates") cfg.eventTemplates = resolve(path, val);
    else if (key == "ter_templates") cfg.terTemplates = resolve(path, val);
    else if (key == "ter_rules") cfg.terRules = resolve(path, val);
    else if (key == "intra_rules") cfg.intraRules = resolve(path, val);
    else if (key == "section_lexicon") cfg.sectionLexicon = resolve(path, val);
    else if (key == "routine_lexicon") cfg.routineLexicon = resolve(path, val);
    else if (key == "fp_lexicon") cfg.fpLexicon = resolve(path, val);
    else if (key == "negation_triggers") cfg.negationTriggers = resolve(path, val);
    else if (key == "negation_terminators") cfg.negationTerminators = resolve(path, val);
    else if (key == "model_dir") cfg.modelDir = resolve(path, val);
    else if (key == "events") cfg.stageEvents = parse_bool(val, path, ln);
    else if (key == "tern") cfg.stageTern = parse_bool(val, path, ln);
    else if (key == "tlink") cfg.stageTlink = parse_bool(val, path, ln);
    else if (key == "closure") cfg.closure = parse_bool(val, path, ln);
    else if (key == "label_fixer") cfg.labelFixer = parse_bool(val, path, ln);
    else if (key == "boundary_adjust") cfg.boundaryAdjust = parse_bool(val, path, ln);
    else if (key == "fp_filter") cfg.fpFilter = parse_bool(val, path, ln);
    else if (key == "negation") cfg.negation = parse_bool(val, path, ln);
    else if (key == "workers") cfg.workers = std::stoi(val);
    else if (key == "coref_threshold") cfg.corefThreshold = std::stod(val);
    else if (key == "crf_c") cfg.hyper.c = std::stod(val);
    else if (key == "crf_eta") cfg.hyper.eta = std::stod(val);
    else if (key == "crf_max_iterations") cfg.hyper.maxIterations = std::stoi(val);
    else if (key == "crf_sgd") cfg.hyper.useSgd = parse_bool(val, path, ln);
    else if (key == "schema_problem" || key == "schema_treatment" || key == "schema_test") {
      try {
        crf::SchemaKind k = crf::schema_kind_from(val);
        if (key == "schema_problem") cfg.schemaByCategory["Problem"] = k;
        else if (key == "schema_treatment") cfg.schemaByCategory["Treatment"] = k;
        else cfg.schemaByCategory["Test"] = k;
      } catch (const std::exception& e) {
        throw ConfigError(path, ln, e.what());
      }
    } else {
      throw ConfigError(path, ln, "unknown key '" + key + "'");
    }
  }
}

void check_exists(const std::string& p, const char* what) {
  if (!p.empty() && !fs::exists(p))
    throw std::runtime_error(std::string(what) + " not found: " + p);
}

std::vector<std::string> sorted_standoff_files(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

std::string event_surface(const AnnotatedDocument& ad, const EventMention& e) {
  return text::slice(ad.doc.text, e.span);
}

// mention span -> sentence-relative token range
std::optional<crf::TokenRange> span_to_range(const AnnotatedDocument& ad, const Sentence& s,
                                             const Span& span) {
  std::size_t first = s.endToken, end = s.firstToken;
  for (std::size_t t = s.firstToken; t < s.endToken; ++t)
    if (ad.tokens[t].span.overlaps(span)) {
      first = std::min(first, t);
      end = std::max(end, t + 1);
    }
  if (first >= end) return std::nullopt;
  return crf::TokenRange{first - s.firstToken, end - s.firstToken};
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
  PipelineConfig cfg;
  load_config_into(cfg, path, 0);
  for (const auto& [p, what] :
       std::initializer_list<std::pair<std::string, const char*>>{
           {cfg.lexiconDir, "lexicon dir"},
           {cfg.eventTemplates, "event template file"},
           {cfg.terTemplates, "TER template file"},
           {cfg.terRules, "TER rule file"},
           {cfg.intraRules, "intra rule file"},
           {cfg.sectionLexicon, "section lexicon"},
           {cfg.routineLexicon, "routine-measurement lexicon"},
           {cfg.fpLexicon, "FP lexicon"},
           {cfg.negationTriggers, "negation trigger file"},
           {cfg.negationTerminators, "negation terminator file"}})
    check_exists(p, what);
  if (cfg.workers < 1) cfg.workers = 1;
  return cfg;
}

Pipeline Pipeline::load(const PipelineConfig& cfg, bool requireModels) {
  Pipeline p;
  p.cfg = cfg;
  p.gazetteer = cfg.lexiconDir.empty() ? preproc::Gazetteer()
                                       : preproc::Gazetteer::load(cfg.lexiconDir);
  p.tagger = std::make_unique<preproc::BaselineTagger>();

  p.postprocess = events::PostprocessConfig::defaults();
  p.postprocess.enableLabelFixer = cfg.labelFixer;
  p.postprocess.enableBoundaryAdjust = cfg.boundaryAdjust;
  p.postprocess.enableFpFilter = cfg.fpFilter;
  if (!cfg.fpLexicon.empty())
    p.postprocess.fpLexicon = events::PostprocessConfig::load_fp_lexicon(cfg.fpLexicon);

  p.negationCfg = (!cfg.negationTriggers.empty() && !cfg.negationTerminators.empty())
                      ? events::NegationConfig::load(cfg.negationTriggers, cfg.negationTerminators)
                      : events::NegationConfig::defaults();

  if (!cfg.eventTemplates.empty()) p.eventTemplates = crf::load_templates(cfg.eventTemplates);
  if (!cfg.terTemplates.empty()) p.terTemplates = crf::load_templates(cfg.terTemplates);
  if (!cfg.terRules.empty()) p.terRules = tern::load_rules(cfg.terRules);

  if (!cfg.modelDir.empty()) {
    for (const char* cat : {"Problem", "Treatment", "Test"}) {
      fs::path mp = fs::path(cfg.modelDir) / (text::to_lower(cat) + ".json");
      if (fs::exists(mp))
        p.eventModels.byCategory.emplace(cat, crf::CrfModel::load_file(mp.string()));
      else if (requireModels)
        throw std::runtime_error("missing model file " + mp.string());
    }
    fs::path tp = fs::path(cfg.modelDir) / "ter.json";
    if (fs::exists(tp)) p.terModel = crf::CrfModel::load_file(tp.string());
  } else if (requireModels) {
    throw std::runtime_error("model_dir not configured");
  }

  p.tlinkCfg.intraRules = !cfg.intraRules.empty() ? tlink::load_intra_rules(cfg.intraRules)
                                                  : std::vector<tlink::IntraRule>{};
  p.tlinkCfg.sections = (!cfg.sectionLexicon.empty() && !cfg.routineLexicon.empty())
                            ? tlink::SectionConfig::load(cfg.sectionLexicon, cfg.routineLexicon)
                            : tlink::SectionConfig::defaults();
  p.tlinkCfg.corefThreshold = cfg.corefThreshold;
  p.tlinkCfg.closure = cfg.closure;
  return p;
}

void Pipeline::annotate_entities(AnnotatedDocument& ad) const {
  preproc::preprocess(ad, gazetteer, *tagger);
  tlink::detect_sections(ad, tlinkCfg.sections);

  if (cfg.stageEvents && !eventModels.byCategory.empty()) {
    ad.events = events::extract_events(ad, eventModels, postprocess);
    if (cfg.negation)
      for (const auto& s : ad.sentences) events::detect_negation(ad.events, ad.tokens, s, negationCfg);
  }

  if (cfg.stageTern) {
    std::vector<TimexMention> ruleOut = tern::recognize_rules(ad, terRules);
    std::vector<TimexMention> mlOut =
        terModel ? tern::recognize_ml(ad, *terModel) : std::vector<TimexMention>{};
    ad.timexes = tern::post_filter(tern::merge_hybrid(ruleOut, mlOut), ad);

    tern::NormContext ctx;
    auto it = ad.doc.meta.find(tlink::kMetaDct);
    if (it == ad.doc.meta.end()) it = ad.doc.meta.find(tlink::kMetaAdmission);
    ctx.anchorDate = it != ad.doc.meta.end() ? it->second : "1970-01-01";
    for (auto& m : ad.timexes) m = tern::normalize(std::move(m), ad.tokens, ctx);
    for (std::size_t i = 0; i < ad.timexes.size(); ++i)
      ad.timexes[i].id = "T" + std::to_string(i + 1);
  }
}

void Pipeline::annotate_links(AnnotatedDocument& ad, const strsim::TfidfCorpusStats* stats,
                              std::vector<std::string>* warnings) const {
  if (!cfg.stageTlink) return;
  tlink::TlinkConfig local = tlinkCfg;
  if (stats) local.simStats = *stats;
  ad.tlinks = tlink::extract_all(ad, local, warnings);
}

TrainSummary cmd_train(const PipelineConfig& cfg, const std::string& corpusDir) {
  Pipeline p = Pipeline::load(cfg, /*requireModels=*/false);
  std::vector<AnnotatedDocument> docs;
  for (const auto& f : sorted_standoff_files(corpusDir))
    docs.push_back(standoff::read_file(f));
  if (docs.empty()) throw EmptyCorpus();
  for (auto& ad : docs) {
    auto events = std::move(ad.events);
    auto timexes = std::move(ad.timexes);
    preproc::preprocess(ad, p.gazetteer, *p.tagger);
    ad.events = std::move(events);
    ad.timexes = std::move(timexes);
  }

  if (!cfg.modelDir.empty()) fs::create_directories(cfg.modelDir);
  TrainSummary summary;

  auto train_one = [&](const std::string& name, crf::SchemaKind kind,
                       const std::vector<crf::FeatureTemplate>& templates,
                       auto&& sentenceRanges,
                       auto&& matrixOf) {
    crf::LabelSchema schema{kind, name};
    std::vector<crf::TrainingSentence> data;
    for (const auto& ad : docs)
      for (const auto& s : ad.sentences) {
        crf::TrainingSentence ts;
        ts.x = matrixOf(ad, s);
        ts.y = crf::encode_labels(sentenceRanges(ad, s), s.endToken - s.firstToken, schema);
        if (!ts.y.empty()) data.push_back(std::move(ts));
      }
    crf::CrfModel model = crf::train(data, schema, templates, cfg.hyper);
    crf::Objective obj(data, templates, schema, cfg.hyper.c);
    summary.finalObjective[name] = obj.evaluate(model.weights(), nullptr);
    summary.featureCounts[name] = model.feature_index().size();
    if (!cfg.modelDir.empty())
      model.save_file((fs::path(cfg.modelDir) / (text::to_lower(name) + ".json")).string());
    return model;
  };

  for (const auto& [cat, kind] : cfg.schemaByCategory) {
    EventCategory ec = event_category_from(cat);
    train_one(
        cat, kind, p.eventTemplates,
        [&](const AnnotatedDocument& ad, const Sentence& s) {
          std::vector<crf::TokenRange> ranges;
          for (const auto& e : ad.events)
            if (e.category == ec && s.span.contains(e.span))
              if (auto r = span_to_range(ad, s, e.span)) ranges.push_back(*r);
          return ranges;
        },
        [&](const AnnotatedDocument& ad, const Sentence& s) {
          return events::event_feature_matrix(ad.tokens, s);
        });
  }
  train_one(
      "Ter", cfg.terSchema, p.terTemplates,
      [&](const AnnotatedDocument& ad, const Sentence& s) {
        std::vector<crf::TokenRange> ranges;
        for (const auto& t : ad.timexes)
          if (s.span.contains(t.span))
            if (auto r = span_to_range(ad, s, t.span)) ranges.push_back(*r);
        return ranges;
      },
      [&](const AnnotatedDocument& ad, const Sentence& s) {
        return tern::ter_feature_matrix(ad.tokens, s);
      });
  return summary;
}

TagSummary cmd_tag(const PipelineConfig& cfg, const std::string& inputDir,
                   const std::string& outputDir) {
  Pipeline p = Pipeline::load(cfg, /*requireModels=*/false);
  const std::vector<std::string> files = sorted_standoff_files(inputDir);
  fs::create_directories(outputDir);

  struct Slot {
    AnnotatedDocument ad;
    bool ok = false;
    std::string error;
  };
  std::vector<Slot> slots(files.size());

  auto entity_pass = [&](std::size_t i) {
    try {
      slots[i].ad = standoff::read_file(files[i]);
      slots[i].ad.events.clear();
      slots[i].ad.timexes.clear();
      slots[i].ad.tlinks.clear();
      p.annotate_entities(slots[i].ad);
      slots[i].ok = true;
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  };
  auto run_parallel = [&](auto&& fn) {
    const int n = std::max(1, std::min(cfg.workers, static_cast<int>(files.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < files.size(); i = next++) fn(i);
      });
    for (auto& t : pool) t.join();
  };
  run_parallel(entity_pass);

  // batch-scoped IDF statistics over every extracted event surface
  std::vector<std::string> surfaces;
  for (const auto& s : slots)
    if (s.ok)
      for (const auto& e : s.ad.events) surfaces.push_back(event_surface(s.ad, e));
  std::optional<strsim::TfidfCorpusStats> stats;
  if (!surfaces.empty()) stats = strsim::build_stats(surfaces);

  auto link_pass = [&](std::size_t i) {
    if (!slots[i].ok) return;
    try {
      p.annotate_links(slots[i].ad, stats ? &*stats : nullptr, nullptr);
    } catch (const std::exception& e) {
      slots[i].ok = false;
      slots[i].error = e.what();
    }
  };
  run_parallel(link_pass);

  TagSummary summary;
  std::ofstream errlog(fs::path(outputDir) / "errors.log");
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string name = fs::path(files[i]).filename().string();
    if (!slots[i].ok) {
      summary.quarantined.emplace_back(name, slots[i].error);
      errlog << name << "\t" << slots[i].error << "\n";
      continue;
    }
    standoff::write_file(slots[i].ad, (fs::path(outputDir) / name).string());
    ++summary.written;
  }
  return summary;
}

eval::EvalReport cmd_eval(const std::string& goldDir, const std::string& sysDir,
                          TlinkSubset subset) {
  auto read_dir = [&](const std::string& dir) {
    std::vector<AnnotatedDocument> docs;
    for (const auto& f : sorted_standoff_files(dir)) {
      if (fs::path(f).filename() == "errors.log") continue;
      docs.push_back(standoff::read_file(f));
    }
    return docs;
  };
  auto keep = [&](const TLink& l) {
    switch (subset) {
      case TlinkSubset::All: return true;
      case TlinkSubset::Sectime: return l.origin == LinkOrigin::Sectime;
      case TlinkSubset::Intra:
        return l.origin == LinkOrigin::Coordinate || l.origin == LinkOrigin::Prepositional ||
               l.origin == LinkOrigin::Other;
      case TlinkSubset::Inter: return l.origin == LinkOrigin::Coref;
    }
    return true;
  };
  std::vector<AnnotatedDocument> gold = read_dir(goldDir);
  std::vector<AnnotatedDocument> sys = read_dir(sysDir);
  for (auto* docs : {&gold, &sys})
    for (auto& d : *docs)
      std::erase_if(d.tlinks, [&](const TLink& l) { return !keep(l); });
  return eval::score_documents(gold, sys);
}

Timeline cmd_timeline(const AnnotatedDocument& tagged) {
  Timeline tl;
  tlink::TemporalGraph g = tlink::graph_from_links(tagged.tlinks);
  tlink::ClosureResult closed = tlink::transitive_closure(g);
  if (!closed.conflicts.empty())
    tl.notes.push_back("cyclic temporal conflict detected; falling back to document order");

  std::map<std::string, std::string> timexValue;  // id -> ISO date
  for (const auto& t : tagged.timexes)
    if (t.ttype == TimexType::Date && t.value != "UNK" && !t.value.empty())
      timexValue[t.id] = t.value;
  for (const char* st : {kStAdmission, kStDischarge, kStDct}) {
    std::string key = st == std::string(kStAdmission)  ? tlink::kMetaAdmission
                      : st == std::string(kStDischarge) ? tlink::kMetaDischarge
                                                        : tlink::kMetaDct;
    auto it = tagged.doc.meta.find(key);
    if (it != tagged.doc.meta.end()) timexValue[st] = it->second;
  }

  for (const auto& e : tagged.events) {
    TimelineRow row;
    row.anchorId = e.id;
    row.surface = tagged.doc.text.empty() ? "" : text::slice(tagged.doc.text, e.span);
    for (const auto& [anchor, date] : timexValue)
      if (closed.graph.has(e.id, anchor, Relation::Overlap)) {
        row.resolvedDate = date;
        break;
      }
    row.relationToDct = "Unknown";
    if (closed.graph.has(e.id, kStDct, Relation::Before)) row.relationToDct = "Before";
    else if (closed.graph.has(e.id, kStDct, Relation::After)) row.relationToDct = "After";
    else if (closed.graph.has(e.id, kStDct, Relation::Overlap)) row.relationToDct = "Overlap";
    tl.rows.push_back(std::move(row));
  }

  if (closed.conflicts.empty()) {
    std::stable_sort(tl.rows.begin(), tl.rows.end(), [](const TimelineRow& a, const TimelineRow& b) {
      if (a.resolvedDate.has_value() != b.resolvedDate.has_value())
        return a.resolvedDate.has_value();
      if (a.resolvedDate && b.resolvedDate && *a.resolvedDate != *b.resolvedDate)
        return *a.resolvedDate < *b.resolvedDate;
      return false;  // stable: document order
    });
  }
  return tl;
}

}  // namespace clintime::pipeline
