#ifndef CLINTIME_TYPES_HPP
#define CLINTIME_TYPES_HPP

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace clintime {

// Offsets are Unicode scalar-value (code point) offsets into the document
// text, not byte offsets.
struct Span {
  std::int64_t start = 0;
  std::int64_t end = 0;

  bool valid() const { return start >= 0 && start < end; }
  std::int64_t length() const { return end - start; }
  bool overlaps(const Span& o) const { return start < o.end && o.start < end; }
  bool contains(const Span& o) const { return start <= o.start && o.end <= end; }
  bool operator==(const Span& o) const { return start == o.start && end == o.end; }
  bool operator<(const Span& o) const {
    if (start != o.start) return start < o.start;
    return end < o.end;
  }
};

enum class EventCategory { Problem, Treatment, Test };
enum class TimexType { Date, Time, Duration, Frequency };
enum class TimexModifier { NA, Approx, More, Less, Start, Mid, End };
enum class Relation { Before, After, Overlap };
enum class LinkOrigin { Coordinate, Prepositional, Other, Sectime, Coref, Closure };

std::string to_string(EventCategory c);
std::string to_string(TimexType t);
std::string to_string(TimexModifier m);
std::string to_string(Relation r);
std::string to_string(LinkOrigin o);
EventCategory event_category_from(const std::string& s);
TimexType timex_type_from(const std::string& s);
TimexModifier timex_modifier_from(const std::string& s);
Relation relation_from(const std::string& s);
LinkOrigin link_origin_from(const std::string& s);

struct Document {
  std::string id;
  std::string text;  // raw narrative, UTF-8
  std::map<std::string, std::string> meta;
};

struct EventMention {
  std::string id;
  Span span;
  EventCategory category = EventCategory::Problem;
  bool negated = false;
};

struct TimexMention {
  std::string id;
  Span span;
  TimexType ttype = TimexType::Date;
  std::string value;  // ISO-8601 or relative-value string; "UNK" if unresolved
  TimexModifier modifier = TimexModifier::NA;
};

struct TLink {
  std::string id;
  std::string source;  // event id | timex id | SECTIME id
  std::string target;
  Relation relation = Relation::Overlap;
  LinkOrigin origin = LinkOrigin::Other;
};

// Reserved section-time anchor ids.
inline constexpr const char* kStAdmission = "ST-ADMISSION";
inline constexpr const char* kStDischarge = "ST-DISCHARGE";
inline constexpr const char* kStDct = "ST-DCT";
bool is_sectime_anchor(const std::string& id);

enum class TokenKind { Word, Number, Symbol, Punctuation };
enum class TokenCase { LowerCase, UpperCase, UpperInitial, MixedCaps, AllCaps };

enum class GazetteerCategory {
  ClinicalFrequency,
  Duration,
  Festival,
  Season,
  Weekday,
  Month,
  LiteralTime,
  TemporalModifier,
  OrdinalNumber,
  LiteralNumber,
};
std::string to_string(GazetteerCategory c);
GazetteerCategory gazetteer_category_from(const std::string& s);
inline constexpr int kGazetteerCategoryCount = 10;

struct Token {
  Span span;
  std::string text;
  std::string stem;
  std::string pos;    // Penn-style
  std::string chunk;  // BIO-NP style
  TokenKind kind = TokenKind::Word;
  TokenCase tcase = TokenCase::LowerCase;
  std::set<GazetteerCategory> gazetteerTags;
};

struct Sentence {
  Span span;
  std::size_t firstToken = 0;  // index range [firstToken, endToken)
  std::size_t endToken = 0;
};

struct AnnotatedDocument {
  Document doc;
  std::vector<Token> tokens;
  std::vector<Sentence> sentences;
  std::vector<EventMention> events;
  std::vector<TimexMention> timexes;
  std::vector<TLink> tlinks;
  std::vector<std::pair<std::string, Span>> sections;
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int ln, const std::string& reason)
      : std::runtime_error("parse error at line " + std::to_string(ln) + ": " + reason),
        line(ln) {}
};

struct ValidationError : std::runtime_error {
  std::string id;
  ValidationError(const std::string& annId, const std::string& constraint)
      : std::runtime_error("validation error [" + annId + "]: " + constraint), id(annId) {}
};

}  // namespace clintime

#endif
