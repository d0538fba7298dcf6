#include <algorithm>

#include "clintime/tlink.hpp"

namespace clintime::tlink {

// Fixpoint iteration: each pass derives every edge implied by one composition
// step over the current graph, then merges. Derivations are collected first
// and applied in sorted order so conflict handling is deterministic.
ClosureResult transitive_closure(const TemporalGraph& g) {
  ClosureResult res;
  res.graph = g;
  std::set<std::pair<std::string, std::string>> conflictSet;

  bool changed = true;
  while (changed) {
    changed = false;
    const auto& before = res.graph.before_edges();
    const auto& overlap = res.graph.overlap_edges();

    std::set<std::pair<std::string, std::string>> newBefore;
    std::set<std::pair<std::string, std::string>> newOverlap;

    // before(a,b), before(b,c) => before(a,c)
    for (const auto& [a, b] : before)
      for (const auto& [b2, c] : before)
        if (b == b2 && a != c && !res.graph.has(a, c, Relation::Before))
          newBefore.insert({a, c});
    // overlap is symmetric; expand pairs both ways for composition
    auto overlapsOf = [&](const std::string& x) {
      std::vector<std::string> out;
      for (const auto& [p, q] : overlap) {
        if (p == x) out.push_back(q);
        if (q == x) out.push_back(p);
      }
      return out;
    };
    // overlap(a,b), overlap(b,c) => overlap(a,c)
    for (const auto& [p, q] : overlap)
      for (const std::string& aSide : {p, q}) {
        const std::string& other = aSide == p ? q : p;
        for (const std::string& c : overlapsOf(other))
          if (c != aSide && !res.graph.has(aSide, c, Relation::Overlap))
            newOverlap.insert({std::min(aSide, c), std::max(aSide, c)});
      }
    // before(a,b), overlap(b,c) => before(a,c)
    // before(a,b), overlap(a,c) => before(c,b)
    for (const auto& [a, b] : before) {
      for (const std::string& c : overlapsOf(b))
        if (a != c && !res.graph.has(a, c, Relation::Before)) newBefore.insert({a, c});
      for (const std::string& c : overlapsOf(a))
        if (c != b && !res.graph.has(c, b, Relation::Before)) newBefore.insert({c, b});
    }

    for (const auto& [a, c] : newBefore) {
      if (res.graph.has(c, a, Relation::Before)) {
        // both orders inferable: record the contradiction, add neither
        conflictSet.insert({std::min(a, c), std::max(a, c)});
        continue;
      }
      changed = res.graph.add(a, c, Relation::Before) || changed;
    }
    for (const auto& [a, c] : newOverlap)
      changed = res.graph.add(a, c, Relation::Overlap) || changed;
  }

  res.conflicts.assign(conflictSet.begin(), conflictSet.end());
  return res;
}

}  // namespace clintime::tlink
