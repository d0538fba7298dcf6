#ifndef CLINTIME_TERN_HPP
#define CLINTIME_TERN_HPP

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "clintime/crf.hpp"
#include "clintime/types.hpp"

namespace clintime::tern {

struct RuleCompileError : std::runtime_error {
  explicit RuleCompileError(const std::string& id)
      : std::runtime_error("cannot compile TER rule " + id) {}
};

// One matcher per token: a text regex (case-insensitive, full match), a
// gazetteer category, or a token kind.
struct Matcher {
  enum class Kind { Regex, Gazetteer, TokenKind } kind = Kind::Regex;
  std::regex re;
  std::string reSource;
  GazetteerCategory gaz = GazetteerCategory::Weekday;
  TokenKind tokenKind = TokenKind::Word;

  bool matches(const Token& t) const;
};

struct TerRule {
  std::string id;
  int priority = 0;
  std::optional<TimexType> ttypeHint;
  std::vector<Matcher> pattern;
};

// Rule file: id<TAB>priority<TAB>type<TAB>pattern-DSL, pattern tokens
// separated by spaces: re:<regex> | gaz:<Category> | kind:<Kind>;
// type "-" leaves the hint unset.
TerRule parse_rule_line(const std::string& line);
std::vector<TerRule> load_rules(const std::string& path);

// Longest match per start position; higher priority wins overlaps.
std::vector<TimexMention> recognize_rules(const AnnotatedDocument& ad,
                                          const std::vector<TerRule>& rules);

// Feature grid: position, token, dictionary, kind, case, kind, case
// (columns 3/4 mirror 5/6 so every index used by the stock template file
// resolves).
crf::FeatureMatrix ter_feature_matrix(const std::vector<Token>& tokens, const Sentence& s);

std::vector<TimexMention> recognize_ml(const AnnotatedDocument& ad, const crf::CrfModel& model);

// Union at the mention level: overlapping spans merge to the span union,
// rule type hints win type conflicts.
std::vector<TimexMention> merge_hybrid(const std::vector<TimexMention>& ruleOut,
                                       const std::vector<TimexMention>& mlOut);

std::vector<TimexMention> post_filter(std::vector<TimexMention> mentions,
                                      const AnnotatedDocument& ad);

// ---- Normalization ----

struct NormContext {
  std::string anchorDate;                  // ISO-8601 date (DCT or admission)
  std::optional<std::string> sectionAnchor;
};

struct UnnormalizableExpression : std::runtime_error {
  UnnormalizableExpression() : std::runtime_error("temporal expression cannot be normalized") {}
};

struct CivilDate {
  int year = 1970, month = 1, day = 1;
  std::string iso() const;
};
std::optional<CivilDate> parse_iso_date(const std::string& s);
CivilDate add_days(const CivilDate& d, long long days);
long long days_from_civil(const CivilDate& d);
int pivot_two_digit_year(int yy);  // 1930/2029 pivot

// Resolves value + modifier in place; unresolvable values become "UNK".
TimexMention normalize(TimexMention mention, const std::vector<Token>& tokens,
                       const NormContext& ctx);

// True when the value string re-parses under the value grammar for its type.
bool value_well_formed(TimexType t, const std::string& value);

}  // namespace clintime::tern

#endif
