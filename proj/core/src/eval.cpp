#include <algorithm>
#include <array>
#include <set>
#include <sstream>
#include <tuple>

#include "clintime/eval.hpp"

namespace clintime::eval {

MatchCounts match_spans(const std::vector<Span>& gold, const std::vector<Span>& sys,
                        SpanMatchMode mode) {
  MatchCounts mc;
  std::vector<bool> used(sys.size(), false);
  for (std::size_t g = 0; g < gold.size(); ++g) {
    std::size_t best = sys.size();
    std::int64_t bestOverlap = 0;
    bool bestExact = false;
    for (std::size_t s = 0; s < sys.size(); ++s) {
      if (used[s]) continue;
      const bool exact = gold[g] == sys[s];
      if (mode == SpanMatchMode::Strict) {
        if (exact) { best = s; bestExact = true; break; }
        continue;
      }
      if (!gold[g].overlaps(sys[s])) continue;
      const std::int64_t ov = std::min(gold[g].end, sys[s].end) -
                              std::max(gold[g].start, sys[s].start);
      if (exact && !bestExact) { best = s; bestOverlap = ov; bestExact = true; }
      else if (!bestExact && ov > bestOverlap) { best = s; bestOverlap = ov; }
    }
    if (best < sys.size()) {
      used[best] = true;
      ++mc.tp;
      mc.pairs.emplace_back(g, best);
    } else {
      ++mc.fn;
    }
  }
  mc.fp = sys.size() - mc.tp;
  return mc;
}

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf p;
  p.tp = tp;
  p.fp = fp;
  p.fn = fn;
  p.precision = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
  p.recall = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
  p.f1 = p.precision + p.recall > 0 ? 2 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
  return p;
}

TernScore score_tern(const std::vector<TimexMention>& gold, const std::vector<TimexMention>& sys) {
  std::vector<Span> gs, ss;
  for (const auto& m : gold) gs.push_back(m.span);
  for (const auto& m : sys) ss.push_back(m.span);
  MatchCounts strict = match_spans(gs, ss, SpanMatchMode::Strict);
  MatchCounts lenient = match_spans(gs, ss, SpanMatchMode::Lenient);

  TernScore sc;
  sc.strict = prf_from_counts(strict.tp, strict.fp, strict.fn);
  sc.lenient = prf_from_counts(lenient.tp, lenient.fp, lenient.fn);
  std::size_t typeOk = 0, valueOk = 0, modOk = 0;
  for (const auto& [g, s] : lenient.pairs) {
    typeOk += gold[g].ttype == sys[s].ttype;
    valueOk += gold[g].value == sys[s].value;
    modOk += gold[g].modifier == sys[s].modifier;
  }
  const std::size_t n = lenient.pairs.size();
  sc.typeAccuracy = n ? static_cast<double>(typeOk) / n : 0.0;
  sc.valueAccuracy = n ? static_cast<double>(valueOk) / n : 0.0;
  sc.modifierAccuracy = n ? static_cast<double>(modOk) / n : 0.0;
  sc.primary = sc.lenient.f1 * sc.valueAccuracy;
  return sc;
}

tlink::TemporalGraph reduce(const tlink::TemporalGraph& g) {
  tlink::TemporalGraph r = g;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [s, t, rel] : r.edges()) {
      tlink::TemporalGraph without = r;
      without.remove(s, t, rel);
      if (tlink::transitive_closure(without).graph.has(s, t, rel)) {
        r = std::move(without);
        changed = true;
        break;  // restart in canonical order
      }
    }
  }
  return r;
}

namespace {

std::size_t verified_count(const tlink::TemporalGraph& reduced,
                           const tlink::TemporalGraph& closedOther) {
  std::size_t n = 0;
  for (const auto& [s, t, rel] : reduced.edges()) n += closedOther.has(s, t, rel);
  return n;
}

}  // namespace

TempEval3Score tempeval3_score(const tlink::TemporalGraph& gold, const tlink::TemporalGraph& sys) {
  TempEval3Score sc;
  sc.emptyGold = gold.empty();
  sc.emptySys = sys.empty();
  const tlink::TemporalGraph redSys = reduce(sys);
  const tlink::TemporalGraph redGold = reduce(gold);
  const tlink::TemporalGraph cloGold = tlink::transitive_closure(gold).graph;
  const tlink::TemporalGraph cloSys = tlink::transitive_closure(sys).graph;
  sc.precision =
      redSys.edge_count() ? static_cast<double>(verified_count(redSys, cloGold)) / redSys.edge_count()
                          : 0.0;
  sc.recall =
      redGold.edge_count() ? static_cast<double>(verified_count(redGold, cloSys)) / redGold.edge_count()
                           : 0.0;
  sc.f1 = sc.precision + sc.recall > 0 ? 2 * sc.precision * sc.recall / (sc.precision + sc.recall)
                                       : 0.0;
  return sc;
}

Prf customary_score(const std::vector<TLink>& gold, const std::vector<TLink>& sys) {
  auto key = [](const TLink& l) {
    if (l.relation == Relation::Overlap)
      return std::tuple(std::min(l.source, l.target), std::max(l.source, l.target),
                        Relation::Overlap);
    if (l.relation == Relation::Before) return std::tuple(l.source, l.target, Relation::Before);
    return std::tuple(l.target, l.source, Relation::Before);
  };
  std::multiset<std::tuple<std::string, std::string, Relation>> goldSet;
  for (const auto& l : gold) goldSet.insert(key(l));
  std::size_t tp = 0, fp = 0;
  for (const auto& l : sys) {
    auto it = goldSet.find(key(l));
    if (it != goldSet.end()) {
      goldSet.erase(it);
      ++tp;
    } else {
      ++fp;
    }
  }
  return prf_from_counts(tp, fp, goldSet.size());
}

EvalReport score_documents(const std::vector<AnnotatedDocument>& gold,
                           const std::vector<AnnotatedDocument>& sys) {
  std::map<std::string, const AnnotatedDocument*> sysById;
  for (const auto& d : sys) sysById[d.doc.id] = &d;

  static const EventCategory cats[] = {EventCategory::Problem, EventCategory::Treatment,
                                       EventCategory::Test};
  std::map<std::string, std::array<std::size_t, 3>> strictC, lenientC;  // tp, fp, fn
  std::vector<TimexMention> allGoldT, allSysT;
  std::vector<TLink> allGoldL, allSysL;
  tlink::TemporalGraph goldGraph, sysGraph;

  for (const auto& gd : gold) {
    static const AnnotatedDocument empty{};
    const AnnotatedDocument& sd = sysById.count(gd.doc.id) ? *sysById[gd.doc.id] : empty;
    for (EventCategory c : cats) {
      std::vector<Span> gs, ss;
      for (const auto& e : gd.events)
        if (e.category == c) gs.push_back(e.span);
      for (const auto& e : sd.events)
        if (e.category == c) ss.push_back(e.span);
      MatchCounts st = match_spans(gs, ss, SpanMatchMode::Strict);
      MatchCounts le = match_spans(gs, ss, SpanMatchMode::Lenient);
      auto& a = strictC[to_string(c)];
      a[0] += st.tp; a[1] += st.fp; a[2] += st.fn;
      auto& b = lenientC[to_string(c)];
      b[0] += le.tp; b[1] += le.fp; b[2] += le.fn;
    }
    allGoldT.insert(allGoldT.end(), gd.timexes.begin(), gd.timexes.end());
    allSysT.insert(allSysT.end(), sd.timexes.begin(), sd.timexes.end());
    // anchor ids are document-scoped; qualify them for the corpus graphs
    auto qualify = [&](const TLink& l) {
      TLink q = l;
      q.source = gd.doc.id + "/" + l.source;
      q.target = gd.doc.id + "/" + l.target;
      return q;
    };
    for (const auto& l : gd.tlinks) {
      allGoldL.push_back(qualify(l));
      goldGraph.add(allGoldL.back().source, allGoldL.back().target, l.relation);
    }
    for (const auto& l : sd.tlinks) {
      allSysL.push_back(qualify(l));
      sysGraph.add(allSysL.back().source, allSysL.back().target, l.relation);
    }
  }

  EvalReport r;
  std::array<std::size_t, 3> microS{}, microL{};
  for (auto& [name, a] : strictC) {
    r.eventStrict[name] = prf_from_counts(a[0], a[1], a[2]);
    for (int i = 0; i < 3; ++i) microS[i] += a[i];
  }
  for (auto& [name, a] : lenientC) {
    r.eventLenient[name] = prf_from_counts(a[0], a[1], a[2]);
    for (int i = 0; i < 3; ++i) microL[i] += a[i];
  }
  r.eventStrict["micro"] = prf_from_counts(microS[0], microS[1], microS[2]);
  r.eventLenient["micro"] = prf_from_counts(microL[0], microL[1], microL[2]);
  r.tern = score_tern(allGoldT, allSysT);
  r.tlinkCustomary = customary_score(allGoldL, allSysL);
  r.tlinkTempEval3 = tempeval3_score(goldGraph, sysGraph);
  return r;
}

std::string EvalReport::table() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  auto row = [&](const std::string& name, const Prf& p) {
    os << "  " << name << ": P=" << p.precision << " R=" << p.recall << " F1=" << p.f1
       << " (tp=" << p.tp << " fp=" << p.fp << " fn=" << p.fn << ")\n";
  };
  os << "EVENT strict\n";
  for (const auto& [n, p] : eventStrict) row(n, p);
  os << "EVENT lenient\n";
  for (const auto& [n, p] : eventLenient) row(n, p);
  os << "TIMEX\n";
  row("strict", tern.strict);
  row("lenient", tern.lenient);
  os << "  type=" << tern.typeAccuracy << " value=" << tern.valueAccuracy
     << " modifier=" << tern.modifierAccuracy << " primary=" << tern.primary << "\n";
  os << "TLINK\n";
  row("customary", tlinkCustomary);
  os << "  tempeval3: P=" << tlinkTempEval3.precision << " R=" << tlinkTempEval3.recall
     << " F1=" << tlinkTempEval3.f1 << "\n";
  return os.str();
}

std::map<std::string, double> EvalReport::key_values() const {
  std::map<std::string, double> kv;
  for (const auto& [n, p] : eventStrict) {
    kv["event.strict." + n + ".p"] = p.precision;
    kv["event.strict." + n + ".r"] = p.recall;
    kv["event.strict." + n + ".f1"] = p.f1;
  }
  for (const auto& [n, p] : eventLenient) {
    kv["event.lenient." + n + ".p"] = p.precision;
    kv["event.lenient." + n + ".r"] = p.recall;
    kv["event.lenient." + n + ".f1"] = p.f1;
  }
  kv["timex.strict.f1"] = tern.strict.f1;
  kv["timex.lenient.f1"] = tern.lenient.f1;
  kv["timex.type"] = tern.typeAccuracy;
  kv["timex.value"] = tern.valueAccuracy;
  kv["timex.modifier"] = tern.modifierAccuracy;
  kv["timex.primary"] = tern.primary;
  kv["tlink.customary.p"] = tlinkCustomary.precision;
  kv["tlink.customary.r"] = tlinkCustomary.recall;
  kv["tlink.customary.f1"] = tlinkCustomary.f1;
  kv["tlink.tempeval3.p"] = tlinkTempEval3.precision;
  kv["tlink.tempeval3.r"] = tlinkTempEval3.recall;
  kv["tlink.tempeval3.f1"] = tlinkTempEval3.f1;
  return kv;
}

}  // namespace clintime::eval
