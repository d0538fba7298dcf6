#ifndef CLINTIME_TLINK_HPP
#define CLINTIME_TLINK_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clintime/stringsim.hpp"
#include "clintime/types.hpp"

namespace clintime::tlink {

enum class RuleKind { Coordinate, Prepositional, Other };
enum class Direction { LeftToRight, RightToLeft };

// One intra-sentence pattern: <leftType> <connector tokens> <rightType>.
// Anchor type patterns are EVENT categories ("PROBLEM"...), TIMEX types
// ("DATE"...), or the wildcards "EVENT" / "TIMEX" / "*".
struct IntraRule {
  std::string id;
  RuleKind kind = RuleKind::Other;
  std::string leftType;
  std::vector<std::string> connector;  // lowercased; empty only for kind Other
  std::string rightType;
  Relation relation = Relation::Overlap;
  Direction direction = Direction::LeftToRight;
  int maxTokenDistance = 5;
};

// Rule file: id<TAB>kind<TAB>leftType<TAB>connector<TAB>rightType<TAB>
// relation<TAB>direction(lr|rl)<TAB>maxDist; connector tokens separated by
// spaces, "-" for none.
IntraRule parse_intra_rule_line(const std::string& line);
std::vector<IntraRule> load_intra_rules(const std::string& path);

// Adjacent anchor pairs only; kind precedence Coordinate > Prepositional >
// Other, first match within a kind.
std::vector<TLink> extract_intra(const AnnotatedDocument& ad, const std::vector<IntraRule>& rules);

struct MissingAnchorDate : std::runtime_error {
  explicit MissingAnchorDate(const std::string& docId)
      : std::runtime_error("document " + docId + " carries no anchor date") {}
};

struct SectionConfig {
  // lowercased header text -> sectime anchor id (ST-ADMISSION / ST-DISCHARGE)
  std::map<std::string, std::string> headerAnchors;
  std::set<std::string> routineMeasurements;  // lowercased surfaces

  static SectionConfig defaults();
  static SectionConfig load(const std::string& sectionFile, const std::string& routineFile);
};

// Locates section headers in the text and fills ad.sections.
void detect_sections(AnnotatedDocument& ad, const SectionConfig& cfg);

// Meta keys consulted for anchor dates.
inline constexpr const char* kMetaAdmission = "admission";
inline constexpr const char* kMetaDischarge = "discharge";
inline constexpr const char* kMetaDct = "dct";

// Each event links Before its section's date; with only a DCT every event
// anchors to ST-DCT and routine measurements get Overlap instead.
std::vector<TLink> extract_sectime(const AnnotatedDocument& ad, const SectionConfig& cfg);

// All unordered event pairs; links pairs with soft_tfidf >= threshold.
std::vector<TLink> extract_coref(const AnnotatedDocument& ad,
                                 const strsim::TfidfCorpusStats& stats,
                                 double threshold = 0.8);

// Before edges are stored ordered; After inserts as the inverted Before edge
// with an orientation flag so round-trips preserve the surface direction.
// Overlap edges are stored min/max-canonical (the relation is symmetric).
class TemporalGraph {
 public:
  using Edge = std::pair<std::string, std::string>;

  // Returns false (and records nothing) on a self-loop or a Before/After
  // contradiction with an existing edge.
  bool add(const std::string& source, const std::string& target, Relation r);
  bool has(const std::string& source, const std::string& target, Relation r) const;
  bool empty() const { return before_.empty() && overlap_.empty(); }

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::set<Edge>& before_edges() const { return before_; }
  const std::set<Edge>& overlap_edges() const { return overlap_; }
  bool inverted(const Edge& beforeEdge) const { return invertedFlags_.count(beforeEdge) > 0; }

  // Edges in canonical order, Before edges re-oriented per their flag.
  std::vector<std::tuple<std::string, std::string, Relation>> edges() const;
  std::size_t edge_count() const { return before_.size() + overlap_.size(); }
  bool remove(const std::string& source, const std::string& target, Relation r);

 private:
  std::set<std::string> nodes_;
  std::set<Edge> before_;
  std::set<Edge> overlap_;   // first < second
  std::set<Edge> invertedFlags_;
};

TemporalGraph graph_from_links(const std::vector<TLink>& links);

struct ClosureResult {
  TemporalGraph graph;
  std::vector<std::pair<std::string, std::string>> conflicts;  // skipped pairs
};

// Fixpoint under the composition rules B.B=B, A.A=A, O.O=O,
// (A before B, B overlap C) => A before C, (A before B, A overlap C) =>
// C before B; Overlap symmetric, After = inverted Before.
ClosureResult transitive_closure(const TemporalGraph& g);

struct TlinkConfig {
  std::vector<IntraRule> intraRules;
  SectionConfig sections = SectionConfig::defaults();
  std::optional<strsim::TfidfCorpusStats> simStats;
  double corefThreshold = 0.8;
  bool closure = false;
};

// Intra + sectime + coref, deduped keeping the earliest stage, then closure
// when enabled (derived edges get origin Closure). Link ids are L1, L2, ...
std::vector<TLink> extract_all(const AnnotatedDocument& ad, const TlinkConfig& cfg,
                               std::vector<std::string>* warnings = nullptr);

}  // namespace clintime::tlink

#endif
