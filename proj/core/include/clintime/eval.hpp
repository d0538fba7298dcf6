#ifndef CLINTIME_EVAL_HPP
#define CLINTIME_EVAL_HPP

#include <map>
#include <string>
#include <vector>

#include "clintime/tlink.hpp"
#include "clintime/types.hpp"

namespace clintime::eval {

enum class SpanMatchMode { Strict, Lenient };

struct MatchCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
  // (gold index, sys index) of each matched pair
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Greedy one-to-one matching in gold order; exact matches preferred, then
// maximal overlap; each annotation matched at most once.
MatchCounts match_spans(const std::vector<Span>& gold, const std::vector<Span>& sys,
                        SpanMatchMode mode);

struct Prf {
  double precision = 0, recall = 0, f1 = 0;
  std::size_t tp = 0, fp = 0, fn = 0;
};
Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct TernScore {
  Prf strict;
  Prf lenient;
  double typeAccuracy = 0;
  double valueAccuracy = 0;
  double modifierAccuracy = 0;
  double primary = 0;  // lenient F1 x value accuracy
};
TernScore score_tern(const std::vector<TimexMention>& gold, const std::vector<TimexMention>& sys);

struct TempEval3Score {
  double precision = 0, recall = 0, f1 = 0;
  bool emptySys = false, emptyGold = false;
};

// Removes edges inferable from the rest, greedily in canonical
// (source, target, relation) order, to fixpoint.
tlink::TemporalGraph reduce(const tlink::TemporalGraph& g);

// P = |reduce(sys) verified in closure(gold)| / |reduce(sys)|, R symmetric.
TempEval3Score tempeval3_score(const tlink::TemporalGraph& gold, const tlink::TemporalGraph& sys);

// Exact tuple matching with Overlap symmetry and Before/After inversion.
Prf customary_score(const std::vector<TLink>& gold, const std::vector<TLink>& sys);

struct EvalReport {
  std::map<std::string, Prf> eventStrict;   // per category + "micro"
  std::map<std::string, Prf> eventLenient;
  TernScore tern;
  Prf tlinkCustomary;
  TempEval3Score tlinkTempEval3;

  std::string table() const;                       // human-readable
  std::map<std::string, double> key_values() const;  // machine-readable
};

EvalReport score_documents(const std::vector<AnnotatedDocument>& gold,
                           const std::vector<AnnotatedDocument>& sys);

}  // namespace clintime::eval

#endif
