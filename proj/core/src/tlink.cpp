#include <algorithm>
#include <fstream>

#include "clintime/text.hpp"
#include "clintime/tlink.hpp"

namespace clintime::tlink {

namespace {

struct Anchor {
  std::string id;
  Span span;
  std::string type;  // PROBLEM/TREATMENT/TEST/DATE/TIME/DURATION/FREQUENCY
  bool isEvent = false;
};

bool type_matches(const std::string& pattern, const Anchor& a) {
  if (pattern == "*") return true;
  if (pattern == "EVENT") return a.isEvent;
  if (pattern == "TIMEX") return !a.isEvent;
  return pattern == a.type;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

IntraRule parse_intra_rule_line(const std::string& line) {
  auto f = text::split(line, '\t');
  if (f.size() != 8) throw ParseError(0, "intra rule needs 8 fields, got " + std::to_string(f.size()));
  IntraRule r;
  r.id = f[0];
  if (f[1] == "Coordinate") r.kind = RuleKind::Coordinate;
  else if (f[1] == "Prepositional") r.kind = RuleKind::Prepositional;
  else if (f[1] == "Other") r.kind = RuleKind::Other;
  else throw ParseError(0, "unknown rule kind " + f[1]);
  r.leftType = f[2];
  if (f[3] != "-")
    for (const auto& w : text::split(f[3], ' '))
      if (!w.empty()) r.connector.push_back(text::to_lower(w));
  r.rightType = f[4];
  r.relation = relation_from(f[5]);
  if (f[6] == "lr") r.direction = Direction::LeftToRight;
  else if (f[6] == "rl") r.direction = Direction::RightToLeft;
  else throw ParseError(0, "direction must be lr or rl");
  r.maxTokenDistance = std::stoi(f[7]);
  if (r.maxTokenDistance <= 0) throw ParseError(0, "maxDist must be positive");
  if (r.connector.empty() && r.kind != RuleKind::Other)
    throw ParseError(0, "connector required for kind " + f[1]);
  return r;
}

std::vector<IntraRule> load_intra_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open intra rule file " + path);
  std::vector<IntraRule> rules;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      rules.push_back(parse_intra_rule_line(line));
    } catch (const ParseError& e) {
      throw ParseError(ln, e.what());
    }
  }
  return rules;
}

std::vector<TLink> extract_intra(const AnnotatedDocument& ad,
                                 const std::vector<IntraRule>& rules) {
  // stable kind-precedence ordering, file order within a kind
  std::vector<const IntraRule*> ordered;
  for (RuleKind k : {RuleKind::Coordinate, RuleKind::Prepositional, RuleKind::Other})
    for (const auto& r : rules)
      if (r.kind == k) ordered.push_back(&r);

  std::vector<TLink> out;
  for (const auto& sentence : ad.sentences) {
    std::vector<Anchor> anchors;
    for (const auto& e : ad.events)
      if (sentence.span.contains(e.span))
        anchors.push_back({e.id, e.span, upper(to_string(e.category)), true});
    for (const auto& t : ad.timexes)
      if (sentence.span.contains(t.span))
        anchors.push_back({t.id, t.span, upper(to_string(t.ttype)), false});
    std::sort(anchors.begin(), anchors.end(),
              [](const Anchor& a, const Anchor& b) { return a.span < b.span; });

    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
      const Anchor& left = anchors[i];
      const Anchor& right = anchors[i + 1];
      // tokens strictly between the pair
      std::vector<std::string> between;
      for (std::size_t t = sentence.firstToken; t < sentence.endToken; ++t) {
        const Span& ts = ad.tokens[t].span;
        if (ts.start >= left.span.end && ts.end <= right.span.start)
          between.push_back(text::to_lower(ad.tokens[t].text));
      }
      for (const IntraRule* r : ordered) {
        if (static_cast<int>(between.size()) > r->maxTokenDistance) continue;
        if (!type_matches(r->leftType, left) || !type_matches(r->rightType, right)) continue;
        if (!r->connector.empty()) {
          bool found = false;
          if (r->connector.size() <= between.size())
            for (std::size_t s = 0; s + r->connector.size() <= between.size() && !found; ++s)
              found = std::equal(r->connector.begin(), r->connector.end(), between.begin() + s);
          if (!found) continue;
        }
        TLink link;
        if (r->direction == Direction::LeftToRight) {
          link.source = left.id;
          link.target = right.id;
        } else {
          link.source = right.id;
          link.target = left.id;
        }
        link.relation = r->relation;
        switch (r->kind) {
          case RuleKind::Coordinate: link.origin = LinkOrigin::Coordinate; break;
          case RuleKind::Prepositional: link.origin = LinkOrigin::Prepositional; break;
          case RuleKind::Other: link.origin = LinkOrigin::Other; break;
        }
        out.push_back(std::move(link));
        break;
      }
    }
  }
  return out;
}

SectionConfig SectionConfig::defaults() {
  SectionConfig cfg;
  for (const char* h : {"history of present illness", "history of the present illness",
                        "hpi", "history"})
    cfg.headerAnchors[h] = kStAdmission;
  for (const char* h : {"hospital course", "course in hospital", "brief hospital course"})
    cfg.headerAnchors[h] = kStDischarge;
  for (const char* s : {"weight", "height", "blood pressure", "heart rate", "pulse",
                        "temperature", "respiratory rate", "oxygen saturation", "bmi"})
    cfg.routineMeasurements.insert(s);
  return cfg;
}

SectionConfig SectionConfig::load(const std::string& sectionFile, const std::string& routineFile) {
  SectionConfig cfg;
  std::ifstream sec(sectionFile);
  if (!sec) throw std::runtime_error("cannot open section lexicon " + sectionFile);
  std::string line;
  int ln = 0;
  while (std::getline(sec, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 2) throw ParseError(ln, "section lexicon line needs header<TAB>anchor");
    if (f[1] != kStAdmission && f[1] != kStDischarge)
      throw ParseError(ln, "anchor must be ST-ADMISSION or ST-DISCHARGE");
    cfg.headerAnchors[text::to_lower(f[0])] = f[1];
  }
  std::ifstream rt(routineFile);
  if (!rt) throw std::runtime_error("cannot open routine-measurement lexicon " + routineFile);
  while (std::getline(rt, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    cfg.routineMeasurements.insert(text::to_lower(line));
  }
  return cfg;
}

void detect_sections(AnnotatedDocument& ad, const SectionConfig& cfg) {
  ad.sections.clear();
  // match headers at line starts, tolerating a trailing colon
  const std::string lowered = text::to_lower(ad.doc.text);
  std::vector<std::pair<std::int64_t, std::string>> starts;  // (cp offset, anchor)
  std::int64_t cp = 0;
  std::size_t byte = 0;
  std::vector<std::pair<std::int64_t, std::size_t>> lineStarts = {{0, 0}};
  while (byte < lowered.size()) {
    unsigned char c = lowered[byte];
    std::size_t len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    if (c == '\n') lineStarts.push_back({cp + 1, byte + 1});
    byte += len;
    ++cp;
  }
  for (auto [cpOff, byteOff] : lineStarts) {
    for (const auto& [header, anchor] : cfg.headerAnchors) {
      if (lowered.compare(byteOff, header.size(), header) != 0) continue;
      std::size_t after = byteOff + header.size();
      if (after < lowered.size() && lowered[after] != ':' && lowered[after] != '\n' &&
          lowered[after] != ' ')
        continue;
      starts.push_back({cpOff, anchor});
      break;
    }
  }
  std::sort(starts.begin(), starts.end());
  const auto docLen = static_cast<std::int64_t>(text::codepoint_length(ad.doc.text));
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::int64_t end = i + 1 < starts.size() ? starts[i + 1].first : docLen;
    ad.sections.push_back({starts[i].second, Span{starts[i].first, end}});
  }
}

std::vector<TLink> extract_sectime(const AnnotatedDocument& ad, const SectionConfig& cfg) {
  const auto& meta = ad.doc.meta;
  const bool hasAdm = meta.count(kMetaAdmission) > 0;
  const bool hasDis = meta.count(kMetaDischarge) > 0;
  const bool hasDct = meta.count(kMetaDct) > 0;
  if (!hasAdm && !hasDis && !hasDct) throw MissingAnchorDate(ad.doc.id);

  std::vector<TLink> out;
  const bool sectioned = hasAdm && hasDis && !ad.sections.empty();
  for (const auto& e : ad.events) {
    TLink link;
    link.source = e.id;
    link.origin = LinkOrigin::Sectime;
    if (sectioned) {
      std::string anchor = kStAdmission;  // events before any header
      for (const auto& [sec, span] : ad.sections)
        if (span.contains(e.span)) anchor = sec;
      link.target = anchor;
      link.relation = Relation::Before;
    } else {
      link.target = kStDct;
      link.relation = Relation::Before;
    }
    // surface lookup via tokens covered by the event
    std::string surface;
    for (const auto& t : ad.tokens)
      if (e.span.contains(t.span)) {
        if (!surface.empty()) surface.push_back(' ');
        surface += text::to_lower(t.text);
      }
    if (cfg.routineMeasurements.count(surface)) link.relation = Relation::Overlap;
    out.push_back(std::move(link));
  }
  return out;
}

std::vector<TLink> extract_coref(const AnnotatedDocument& ad,
                                 const strsim::TfidfCorpusStats& stats, double threshold) {
  std::vector<std::string> surfaces(ad.events.size());
  for (std::size_t i = 0; i < ad.events.size(); ++i) {
    std::string s;
    for (const auto& t : ad.tokens)
      if (ad.events[i].span.contains(t.span)) {
        if (!s.empty()) s.push_back(' ');
        s += t.text;
      }
    surfaces[i] = std::move(s);
  }
  std::vector<TLink> out;
  for (std::size_t i = 0; i < ad.events.size(); ++i)
    for (std::size_t j = i + 1; j < ad.events.size(); ++j) {
      if (surfaces[i].empty() || surfaces[j].empty()) continue;
      if (strsim::soft_tfidf(surfaces[i], surfaces[j], stats) < threshold) continue;
      TLink link;
      link.source = ad.events[i].id;
      link.target = ad.events[j].id;
      link.relation = Relation::Overlap;
      link.origin = LinkOrigin::Coref;
      out.push_back(std::move(link));
    }
  return out;
}

bool TemporalGraph::add(const std::string& source, const std::string& target, Relation r) {
  if (source == target) return false;
  nodes_.insert(source);
  nodes_.insert(target);
  if (r == Relation::Overlap) {
    overlap_.insert({std::min(source, target), std::max(source, target)});
    return true;
  }
  Edge e = r == Relation::Before ? Edge{source, target} : Edge{target, source};
  if (before_.count({e.second, e.first})) return false;  // contradiction
  before_.insert(e);
  if (r == Relation::After) invertedFlags_.insert(e);
  return true;
}

bool TemporalGraph::has(const std::string& source, const std::string& target, Relation r) const {
  if (r == Relation::Overlap)
    return overlap_.count({std::min(source, target), std::max(source, target)}) > 0;
  Edge e = r == Relation::Before ? Edge{source, target} : Edge{target, source};
  return before_.count(e) > 0;
}

bool TemporalGraph::remove(const std::string& source, const std::string& target, Relation r) {
  if (r == Relation::Overlap)
    return overlap_.erase({std::min(source, target), std::max(source, target)}) > 0;
  Edge e = r == Relation::Before ? Edge{source, target} : Edge{target, source};
  invertedFlags_.erase(e);
  return before_.erase(e) > 0;
}

std::vector<std::tuple<std::string, std::string, Relation>> TemporalGraph::edges() const {
  std::vector<std::tuple<std::string, std::string, Relation>> out;
  for (const auto& e : before_) {
    if (invertedFlags_.count(e))
      out.emplace_back(e.second, e.first, Relation::After);
    else
      out.emplace_back(e.first, e.second, Relation::Before);
  }
  for (const auto& e : overlap_) out.emplace_back(e.first, e.second, Relation::Overlap);
  std::sort(out.begin(), out.end());
  return out;
}

TemporalGraph graph_from_links(const std::vector<TLink>& links) {
  TemporalGraph g;
  for (const auto& l : links) g.add(l.source, l.target, l.relation);
  return g;
}

std::vector<TLink> extract_all(const AnnotatedDocument& ad, const TlinkConfig& cfg,
                               std::vector<std::string>* warnings) {
  std::vector<TLink> all = extract_intra(ad, cfg.intraRules);
  try {
    auto sec = extract_sectime(ad, cfg.sections);
    all.insert(all.end(), sec.begin(), sec.end());
  } catch (const MissingAnchorDate& e) {
    if (warnings) warnings->push_back(e.what());
  }
  if (cfg.simStats) {
    auto co = extract_coref(ad, *cfg.simStats, cfg.corefThreshold);
    all.insert(all.end(), co.begin(), co.end());
  }

  // dedup on the undirected equivalence class, earliest stage wins (emission
  // order above is already stage order)
  auto key = [](const TLink& l) {
    if (l.relation == Relation::Overlap)
      return std::tuple(std::min(l.source, l.target), std::max(l.source, l.target),
                        Relation::Overlap);
    if (l.relation == Relation::Before) return std::tuple(l.source, l.target, Relation::Before);
    return std::tuple(l.target, l.source, Relation::Before);
  };
  std::set<std::tuple<std::string, std::string, Relation>> seen;
  std::vector<TLink> out;
  for (auto& l : all)
    if (seen.insert(key(l)).second) out.push_back(std::move(l));

  if (cfg.closure) {
    TemporalGraph g = graph_from_links(out);
    // section times are themselves ordered when both are present
    bool hasAdm = false, hasDis = false;
    for (const auto& l : out) {
      hasAdm = hasAdm || l.source == kStAdmission || l.target == kStAdmission;
      hasDis = hasDis || l.source == kStDischarge || l.target == kStDischarge;
    }
    if (hasAdm && hasDis) g.add(kStAdmission, kStDischarge, Relation::Before);
    ClosureResult res = transitive_closure(g);
    if (warnings)
      for (const auto& [a, b] : res.conflicts)
        warnings->push_back("closure conflict between " + a + " and " + b);
    for (const auto& [s, t, r] : res.graph.edges()) {
      if (seen.count(key(TLink{"", s, t, r, LinkOrigin::Closure}))) continue;
      if ((s == kStAdmission || s == kStDischarge) && (t == kStAdmission || t == kStDischarge))
        continue;  // the scaffolding edge itself is not reported
      TLink l;
      l.source = s;
      l.target = t;
      l.relation = r;
      l.origin = LinkOrigin::Closure;
      seen.insert(key(l));
      out.push_back(std::move(l));
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = "L" + std::to_string(i + 1);
  return out;
}

}  // namespace clintime::tlink
