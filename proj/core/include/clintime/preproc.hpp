#ifndef CLINTIME_PREPROC_HPP
#define CLINTIME_PREPROC_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "clintime/types.hpp"

namespace clintime::preproc {

struct GazetteerLoadError : std::runtime_error {
  explicit GazetteerLoadError(const std::string& file)
      : std::runtime_error("cannot load gazetteer file " + file) {}
};

// One entry per line, UTF-8, '#' comments. Entries may span multiple tokens.
class Gazetteer {
 public:
  // Loads lexicons/<Category>.txt for each of the ten categories.
  static Gazetteer load(const std::string& lexiconDir);
  static Gazetteer from_entries(
      const std::map<GazetteerCategory, std::vector<std::string>>& entries);

  void add(GazetteerCategory cat, const std::string& entry);
  // Longest-match, case-insensitive matching over token sequences; every
  // covered token receives the tag.
  void tag(std::vector<Token>& tokens) const;

  bool contains(GazetteerCategory cat, const std::string& entry) const;
  const std::set<std::string>& abbreviations() const { return abbreviations_; }
  void add_abbreviation(const std::string& a);

 private:
  // entry (lowercased, tokens joined by single space) -> categories
  std::map<std::string, std::set<GazetteerCategory>> entries_;
  std::size_t maxEntryTokens_ = 1;
  std::set<std::string> abbreviations_;  // lowercased, tokenizer protection
};

std::vector<Token> tokenize(const std::string& utf8Text,
                            const std::set<std::string>& protectedAbbrevs = {});

std::vector<Sentence> split_sentences(const std::string& utf8Text,
                                      const std::vector<Token>& tokens);

// Deterministic suffix-stripping stemmer (Porter-style), idempotent.
std::string stem(const std::string& word);
void fill_stems(std::vector<Token>& tokens);

TokenKind classify_kind(const std::u32string& tokenText);
TokenCase classify_case(const std::u32string& tokenText);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // Fills pos and chunk for tokens[s.firstToken, s.endToken).
  virtual void tag(std::vector<Token>& tokens, const Sentence& s) const = 0;
};

// Bundled baseline: lexicon lookup + suffix rules + regex-style NP/VP chunker.
class BaselineTagger : public PosTagger {
 public:
  BaselineTagger();
  // Optional extra lexicon file: "word<TAB>tag" lines.
  explicit BaselineTagger(const std::string& lexiconFile);
  void tag(std::vector<Token>& tokens, const Sentence& s) const override;

 private:
  std::map<std::string, std::string> lexicon_;
  std::string lookup(const Token& t, bool sentenceInitial) const;
};

// Runs the full lexical pipeline on ad.doc.text: tokens, sentences, stems,
// POS/chunk, gazetteer tags.
void preprocess(AnnotatedDocument& ad, const Gazetteer& gaz, const PosTagger& tagger);

}  // namespace clintime::preproc

#endif
