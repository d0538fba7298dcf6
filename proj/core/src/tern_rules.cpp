#include <algorithm>
#include <fstream>

#include "clintime/tern.hpp"
#include "clintime/text.hpp"

namespace clintime::tern {

bool Matcher::matches(const Token& t) const {
  switch (kind) {
    case Kind::Regex:
      return std::regex_match(t.text, re);
    case Kind::Gazetteer:
      return t.gazetteerTags.count(gaz) > 0;
    case Kind::TokenKind:
      return t.kind == tokenKind;
  }
  return false;
}

TerRule parse_rule_line(const std::string& line) {
  auto f = text::split(line, '\t');
  if (f.size() != 4) throw RuleCompileError(f.empty() ? "?" : f[0]);
  TerRule rule;
  rule.id = f[0];
  try {
    rule.priority = std::stoi(f[1]);
  } catch (const std::exception&) {
    throw RuleCompileError(rule.id);
  }
  if (f[2] != "-") rule.ttypeHint = timex_type_from(f[2]);
  for (const auto& part : text::split(f[3], ' ')) {
    if (part.empty()) continue;
    Matcher m;
    if (part.rfind("re:", 0) == 0) {
      m.kind = Matcher::Kind::Regex;
      m.reSource = part.substr(3);
      try {
        m.re = std::regex(m.reSource, std::regex::ECMAScript | std::regex::icase);
      } catch (const std::regex_error&) {
        throw RuleCompileError(rule.id);
      }
    } else if (part.rfind("gaz:", 0) == 0) {
      m.kind = Matcher::Kind::Gazetteer;
      try {
        m.gaz = gazetteer_category_from(part.substr(4));
      } catch (const std::exception&) {
        throw RuleCompileError(rule.id);
      }
    } else if (part.rfind("kind:", 0) == 0) {
      m.kind = Matcher::Kind::TokenKind;
      std::string k = part.substr(5);
      if (k == "Word")
        m.tokenKind = TokenKind::Word;
      else if (k == "Number")
        m.tokenKind = TokenKind::Number;
      else if (k == "Symbol")
        m.tokenKind = TokenKind::Symbol;
      else if (k == "Punctuation")
        m.tokenKind = TokenKind::Punctuation;
      else
        throw RuleCompileError(rule.id);
    } else {
      throw RuleCompileError(rule.id);
    }
    rule.pattern.push_back(std::move(m));
  }
  if (rule.pattern.empty()) throw RuleCompileError(rule.id);
  return rule;
}

std::vector<TerRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open TER rule file " + path);
  std::vector<TerRule> rules;
  std::string line;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    TerRule r = parse_rule_line(line);
    if (!ids.insert(r.id).second) throw RuleCompileError(r.id + " (duplicate id)");
    rules.push_back(std::move(r));
  }
  return rules;
}

std::vector<TimexMention> recognize_rules(const AnnotatedDocument& ad,
                                          const std::vector<TerRule>& rules) {
  struct Hit {
    std::size_t first, end;
    const TerRule* rule;
  };
  std::vector<Hit> hits;
  const auto& tokens = ad.tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const TerRule* best = nullptr;
    std::size_t bestLen = 0;
    for (const auto& r : rules) {
      if (i + r.pattern.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < r.pattern.size() && ok; ++k)
        ok = r.pattern[k].matches(tokens[i + k]);
      if (!ok) continue;
      if (r.pattern.size() > bestLen ||
          (r.pattern.size() == bestLen && best && r.priority > best->priority)) {
        best = &r;
        bestLen = r.pattern.size();
      }
    }
    if (best) hits.push_back({i, i + bestLen, best});
  }
  // higher priority wins overlaps, then longer, then leftmost
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.rule->priority != b.rule->priority) return a.rule->priority > b.rule->priority;
    if (a.end - a.first != b.end - b.first) return a.end - a.first > b.end - b.first;
    return a.first < b.first;
  });
  std::vector<bool> covered(tokens.size(), false);
  std::vector<Hit> kept;
  for (const auto& h : hits) {
    bool clash = false;
    for (std::size_t t = h.first; t < h.end && !clash; ++t) clash = covered[t];
    if (clash) continue;
    for (std::size_t t = h.first; t < h.end; ++t) covered[t] = true;
    kept.push_back(h);
  }
  std::sort(kept.begin(), kept.end(), [](const Hit& a, const Hit& b) { return a.first < b.first; });

  std::vector<TimexMention> out;
  for (const auto& h : kept) {
    TimexMention m;
    m.span = {tokens[h.first].span.start, tokens[h.end - 1].span.end};
    m.ttype = h.rule->ttypeHint.value_or(TimexType::Date);
    out.push_back(std::move(m));
  }
  return out;
}

crf::FeatureMatrix ter_feature_matrix(const std::vector<Token>& tokens, const Sentence& s) {
  crf::FeatureMatrix m;
  for (std::size_t t = s.firstToken; t < s.endToken; ++t) {
    const Token& tok = tokens[t];
    std::string dict;
    for (auto g : tok.gazetteerTags) {
      if (!dict.empty()) dict.push_back('|');
      dict += to_string(g);
    }
    if (dict.empty()) dict = "O";
    std::string kind;
    switch (tok.kind) {
      case TokenKind::Word: kind = "Word"; break;
      case TokenKind::Number: kind = "Number"; break;
      case TokenKind::Symbol: kind = "Symbol"; break;
      case TokenKind::Punctuation: kind = "Punctuation"; break;
    }
    std::string tcase;
    switch (tok.tcase) {
      case TokenCase::LowerCase: tcase = "LowerCase"; break;
      case TokenCase::UpperCase: tcase = "UpperCase"; break;
      case TokenCase::UpperInitial: tcase = "UpperInitial"; break;
      case TokenCase::MixedCaps: tcase = "MixedCaps"; break;
      case TokenCase::AllCaps: tcase = "AllCaps"; break;
    }
    m.rows.push_back({std::to_string(t - s.firstToken), tok.text, dict, kind, tcase, kind, tcase});
  }
  return m;
}

std::vector<TimexMention> recognize_ml(const AnnotatedDocument& ad, const crf::CrfModel& model) {
  std::vector<TimexMention> out;
  for (const auto& sentence : ad.sentences) {
    crf::FeatureMatrix m = ter_feature_matrix(ad.tokens, sentence);
    std::vector<std::string> seq = model.decode(m);
    for (auto r : crf::decode_labels(seq, model.schema())) {
      TimexMention t;
      t.span = {ad.tokens[sentence.firstToken + r.first].span.start,
                ad.tokens[sentence.firstToken + r.second - 1].span.end};
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<TimexMention> merge_hybrid(const std::vector<TimexMention>& ruleOut,
                                       const std::vector<TimexMention>& mlOut) {
  struct Item {
    Span span;
    std::optional<TimexType> ruleType;
    std::optional<TimexType> mlType;
  };
  std::vector<Item> items;
  for (const auto& m : ruleOut) items.push_back({m.span, m.ttype, std::nullopt});
  for (const auto& m : mlOut) {
    bool merged = false;
    for (auto& it : items) {
      if (it.span.overlaps(m.span)) {
        it.span.start = std::min(it.span.start, m.span.start);
        it.span.end = std::max(it.span.end, m.span.end);
        if (!it.mlType) it.mlType = m.ttype;
        merged = true;
        break;
      }
    }
    if (!merged) items.push_back({m.span, std::nullopt, m.ttype});
  }
  // span unions may have created new overlaps among items; coalesce
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < items.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < items.size() && !changed; ++j)
        if (items[i].span.overlaps(items[j].span)) {
          items[i].span.start = std::min(items[i].span.start, items[j].span.start);
          items[i].span.end = std::max(items[i].span.end, items[j].span.end);
          if (!items[i].ruleType) items[i].ruleType = items[j].ruleType;
          if (!items[i].mlType) items[i].mlType = items[j].mlType;
          items.erase(items.begin() + j);
          changed = true;
        }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.span < b.span; });
  std::vector<TimexMention> out;
  for (const auto& it : items) {
    TimexMention m;
    m.span = it.span;
    m.ttype = it.ruleType ? *it.ruleType : it.mlType.value_or(TimexType::Date);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<TimexMention> post_filter(std::vector<TimexMention> mentions,
                                      const AnnotatedDocument& ad) {
  static const std::set<std::string> numericContexts = {"ward", "room", "ext",
                                                        "fax",  "tel",  "phone"};
  static const std::regex slashPair(R"(^(\d{1,4})/(\d{1,4})$)");
  static const std::regex phoneShaped(R"(^\d{3}[-.]\d{3,4}([-.]\d{4})?$|^\d{7,}$)");

  std::vector<TimexMention> out;
  for (auto& m : mentions) {
    std::string surface = text::slice(ad.doc.text, m.span);
    // never drop a mention anchored by a month/weekday gazetteer token
    bool calendarWord = false;
    std::size_t firstTok = ad.tokens.size();
    for (std::size_t t = 0; t < ad.tokens.size(); ++t) {
      if (!ad.tokens[t].span.overlaps(m.span)) continue;
      if (firstTok == ad.tokens.size()) firstTok = t;
      if (ad.tokens[t].gazetteerTags.count(GazetteerCategory::Month) ||
          ad.tokens[t].gazetteerTags.count(GazetteerCategory::Weekday))
        calendarWord = true;
    }
    if (calendarWord) {
      out.push_back(std::move(m));
      continue;
    }

    bool drop = false;
    std::smatch sm;
    if (std::regex_match(surface, sm, slashPair)) {
      // calendar-invalid slash pairs: measurements like 42/21
      int a = std::stoi(sm[1]);
      int b = std::stoi(sm[2]);
      bool mmdd = a >= 1 && a <= 12 && b >= 1 && b <= 31;
      bool ddmm = a >= 1 && a <= 31 && b >= 1 && b <= 12;
      bool mmyy = a >= 1 && a <= 12 && (sm[2].str().size() == 4 || sm[2].str().size() == 2);
      if (!mmdd && !ddmm && !mmyy) drop = true;
    }
    if (!drop && std::regex_match(surface, phoneShaped)) drop = true;
    if (!drop && text::codepoint_length(surface) <= 1) drop = true;
    if (!drop && firstTok != ad.tokens.size() && firstTok > 0) {
      const std::string prevLower = text::to_lower(ad.tokens[firstTok - 1].text);
      bool numericSurface = surface.find_first_of("0123456789") != std::string::npos;
      if (numericSurface && numericContexts.count(prevLower)) drop = true;
    }
    if (!drop) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace clintime::tern
