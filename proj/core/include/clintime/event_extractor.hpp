#ifndef CLINTIME_EVENT_EXTRACTOR_HPP
#define CLINTIME_EVENT_EXTRACTOR_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "clintime/crf.hpp"
#include "clintime/types.hpp"

namespace clintime::events {

struct PostprocessConfig {
  bool enableLabelFixer = true;
  bool enableBoundaryAdjust = true;
  bool enableFpFilter = true;
  std::set<std::string> fpLexicon;        // lowercase surfaces
  std::set<std::string> boundaryPosTags;  // POS tags eligible for expansion
  std::set<std::string> boundaryChunkTags;

  static PostprocessConfig defaults();
  static std::set<std::string> load_fp_lexicon(const std::string& path);
};

// Sequence-label correction pass: a single left-to-right scan applying the
// boundary-repair rewrites (precedence a > b > c > d); output is always
// schema-valid and the pass is idempotent.
std::vector<std::string> label_fix(const std::vector<std::string>& seq, crf::SchemaKind kind);

// Expands the mention over contiguous neighbouring tokens whose POS/chunk
// mark noun-phrase constituents (nouns, adjectives, determiners). Monotone
// and idempotent; never crosses the sentence boundary.
crf::TokenRange boundary_adjust(crf::TokenRange mention, const std::vector<Token>& tokens,
                                const Sentence& sentence, const PostprocessConfig& cfg);

std::vector<EventMention> fp_filter(std::vector<EventMention> mentions, const std::string& docText,
                                    const PostprocessConfig& cfg);

// ---- ConText-style negation ----

enum class NegationDirection { Forward, Backward, Bidirectional };

struct NegationRule {
  std::vector<std::string> trigger;  // lowercased token sequence
  NegationDirection direction = NegationDirection::Forward;
  int scopeLimit = 6;  // token count
};

struct NegationConfig {
  std::vector<NegationRule> rules;
  std::set<std::string> terminators;  // lowercased scope terminators

  static NegationConfig defaults();
  // trigger<TAB>direction<TAB>scopeLimit per line; terminator list one per line.
  static NegationConfig load(const std::string& triggerFile, const std::string& terminatorFile);
};

void detect_negation(std::vector<EventMention>& mentions, const std::vector<Token>& tokens,
                     const Sentence& sentence, const NegationConfig& cfg);

// ---- Full extraction ----

struct CategoryModels {
  std::map<std::string, crf::CrfModel> byCategory;  // "Problem"/"Treatment"/"Test"
};

// Builds the per-sentence feature grid (position, token, stem, POS, chunk).
crf::FeatureMatrix event_feature_matrix(const std::vector<Token>& tokens, const Sentence& s);

std::vector<EventMention> extract_events(const AnnotatedDocument& ad, const CategoryModels& models,
                                         const PostprocessConfig& cfg);

}  // namespace clintime::events

#endif
