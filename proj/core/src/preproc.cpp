#include "clintime/preproc.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "clintime/text.hpp"

namespace clintime::preproc {

namespace {

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v'; }
bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_lower(char32_t c) { return c >= U'a' && c <= U'z'; }
bool is_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
bool is_letter(char32_t c) { return is_lower(c) || is_upper(c) || c > 0x7F; }
bool is_punct(char32_t c) {
  static const std::u32string p = U".,;:!?()[]{}<>\"'`~/\\|-_";
  return p.find(c) != std::u32string::npos;
}

// Length of a leading date/time-shaped digit group: d{1,4}([/-]d{1,4}){1,2}
// or d{1,2}:d{2}(:d{2})?. Keeps "01/04/1988", "12/25", "617-555-0134" and
// "2:23" as single tokens.
std::size_t numeric_group_length(const std::u32string& s, std::size_t pos) {
  std::size_t i = pos;
  auto digits = [&](std::size_t lo, std::size_t hi) -> std::size_t {
    std::size_t k = i;
    while (k < s.size() && is_digit(s[k]) && k - i < hi) ++k;
    if (k - i < lo) return 0;
    return k - i;
  };
  std::size_t d1 = digits(1, 4);
  if (!d1) return 0;
  i += d1;
  if (i < s.size() && s[i] == U':') {
    std::size_t j = i + 1;
    std::size_t save = i;
    i = j;
    std::size_t d2 = digits(2, 2);
    if (!d2) return save - pos;
    i += d2;
    if (i < s.size() && s[i] == U':') {
      std::size_t k = i + 1;
      std::size_t save2 = i;
      i = k;
      std::size_t d3 = digits(2, 2);
      if (!d3) return save2 - pos;
      i += d3;
    }
    return i - pos;
  }
  std::size_t groups = 0;
  while (groups < 2 && i < s.size() && (s[i] == U'/' || s[i] == U'-')) {
    std::size_t j = i + 1;
    std::size_t save = i;
    i = j;
    std::size_t dk = digits(1, 4);
    if (!dk) {
      i = save;
      break;
    }
    i += dk;
    ++groups;
  }
  if (groups == 0) return d1;
  return i - pos;
}

}  // namespace

TokenKind classify_kind(const std::u32string& t) {
  bool letter = false, digit = false, other = false, punct = false;
  for (char32_t c : t) {
    if (is_letter(c))
      letter = true;
    else if (is_digit(c))
      digit = true;
    else if (is_punct(c))
      punct = true;
    else
      other = true;
  }
  if (letter) return TokenKind::Word;
  if (digit) return TokenKind::Number;
  if (punct && !other) return TokenKind::Punctuation;
  return TokenKind::Symbol;
}

TokenCase classify_case(const std::u32string& t) {
  std::size_t lower = 0, upper = 0, letters = 0;
  bool firstIsUpper = false, firstSeen = false;
  for (char32_t c : t) {
    if (is_lower(c)) {
      ++lower;
      ++letters;
      if (!firstSeen) firstSeen = true;
    } else if (is_upper(c)) {
      ++upper;
      ++letters;
      if (!firstSeen) {
        firstSeen = true;
        firstIsUpper = true;
      }
    }
  }
  if (letters == 0 || upper == 0) return TokenCase::LowerCase;
  if (lower == 0) {
    if (letters == 1) return TokenCase::UpperCase;
    return TokenCase::AllCaps;
  }
  if (firstIsUpper && upper == 1) return TokenCase::UpperInitial;
  return TokenCase::MixedCaps;
}

std::vector<Token> tokenize(const std::string& utf8Text,
                            const std::set<std::string>& protectedAbbrevs) {
  std::u32string cps = text::decode_utf8(utf8Text);
  std::vector<Token> out;
  std::size_t maxAbbrevLen = 0;
  for (const auto& a : protectedAbbrevs) maxAbbrevLen = std::max(maxAbbrevLen, a.size());

  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n) {
    if (is_space(cps[i])) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    // Protected abbreviation (longest match, case-insensitive, must not be
    // glued to a following letter/digit).
    if (maxAbbrevLen) {
      std::size_t limit = std::min(maxAbbrevLen, n - i);
      for (std::size_t l = limit; l >= 1 && !len; --l) {
        if (i + l < n && (is_letter(cps[i + l]) || is_digit(cps[i + l]))) continue;
        std::string cand = text::to_lower(text::encode_utf8(cps.substr(i, l)));
        if (protectedAbbrevs.count(cand)) len = l;
      }
    }
    if (!len) len = numeric_group_length(cps, i);
    if (!len) {
      if (is_letter(cps[i])) {
        std::size_t j = i;
        while (j < n && is_letter(cps[j])) ++j;
        len = j - i;
      } else if (is_digit(cps[i])) {
        std::size_t j = i;
        while (j < n && is_digit(cps[j])) ++j;
        len = j - i;
      } else {
        len = 1;
      }
    }
    Token t;
    t.span = {static_cast<std::int64_t>(i), static_cast<std::int64_t>(i + len)};
    std::u32string tt = cps.substr(i, len);
    t.text = text::encode_utf8(tt);
    t.kind = classify_kind(tt);
    t.tcase = classify_case(tt);
    out.push_back(std::move(t));
    i += len;
  }
  return out;
}

std::vector<Sentence> split_sentences(const std::string& utf8Text,
                                      const std::vector<Token>& tokens) {
  std::vector<Sentence> out;
  if (tokens.empty()) return out;
  std::u32string cps = text::decode_utf8(utf8Text);

  auto gapHasBlankLine = [&](std::size_t ti) {
    if (ti + 1 >= tokens.size()) return false;
    int newlines = 0;
    for (auto p = tokens[ti].span.end; p < tokens[ti + 1].span.start; ++p)
      if (cps[p] == U'\n') ++newlines;
    return newlines >= 2;
  };

  std::size_t first = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    bool boundary = false;
    if (i + 1 == tokens.size()) {
      boundary = true;
    } else {
      const std::string& txt = tokens[i].text;
      bool terminal = txt == "." || txt == "!" || txt == "?";
      if (terminal) {
        const Token& next = tokens[i + 1];
        std::u32string nt = text::decode_utf8(next.text);
        bool capitalOrDigit = !nt.empty() && (is_upper(nt[0]) || is_digit(nt[0]));
        bool newlineInGap = false;
        for (auto p = tokens[i].span.end; p < next.span.start; ++p)
          if (cps[p] == U'\n') newlineInGap = true;
        boundary = capitalOrDigit || newlineInGap;
      }
      if (!boundary && gapHasBlankLine(i)) boundary = true;
    }
    if (boundary) {
      Sentence s;
      s.firstToken = first;
      s.endToken = i + 1;
      s.span = {tokens[first].span.start, tokens[i].span.end};
      out.push_back(s);
      first = i + 1;
    }
  }
  return out;
}

void fill_stems(std::vector<Token>& tokens) {
  for (auto& t : tokens) t.stem = stem(t.text);
}

// ---- Gazetteer ----

void Gazetteer::add(GazetteerCategory cat, const std::string& entry) {
  std::string key;
  for (const auto& tok : tokenize(entry)) {
    if (!key.empty()) key.push_back(' ');
    key += text::to_lower(tok.text);
  }
  if (key.empty()) return;
  std::size_t nTokens = std::count(key.begin(), key.end(), ' ') + 1;
  maxEntryTokens_ = std::max(maxEntryTokens_, nTokens);
  entries_[key].insert(cat);
  if (entry.find('.') != std::string::npos) abbreviations_.insert(text::to_lower(entry));
}

void Gazetteer::add_abbreviation(const std::string& a) {
  abbreviations_.insert(text::to_lower(a));
}

bool Gazetteer::contains(GazetteerCategory cat, const std::string& entry) const {
  auto it = entries_.find(text::to_lower(entry));
  return it != entries_.end() && it->second.count(cat);
}

Gazetteer Gazetteer::load(const std::string& lexiconDir) {
  Gazetteer g;
  for (int i = 0; i < kGazetteerCategoryCount; ++i) {
    auto cat = static_cast<GazetteerCategory>(i);
    std::string path = lexiconDir + "/" + to_string(cat) + ".txt";
    std::ifstream in(path);
    if (!in) throw GazetteerLoadError(path);
    std::string line;
    while (std::getline(in, line)) {
      line = text::trim(line);
      if (line.empty() || line[0] == '#') continue;
      g.add(cat, line);
    }
  }
  std::string abbrevPath = lexiconDir + "/abbreviations.txt";
  std::ifstream ab(abbrevPath);
  if (ab) {
    std::string line;
    while (std::getline(ab, line)) {
      line = text::trim(line);
      if (line.empty() || line[0] == '#') continue;
      g.add_abbreviation(line);
    }
  }
  return g;
}

Gazetteer Gazetteer::from_entries(
    const std::map<GazetteerCategory, std::vector<std::string>>& entries) {
  Gazetteer g;
  for (const auto& [cat, list] : entries)
    for (const auto& e : list) g.add(cat, e);
  return g;
}

void Gazetteer::tag(std::vector<Token>& tokens) const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string key;
    for (std::size_t len = 1; len <= maxEntryTokens_ && i + len <= tokens.size(); ++len) {
      if (len > 1) key.push_back(' ');
      key += text::to_lower(tokens[i + len - 1].text);
      auto it = entries_.find(key);
      if (it == entries_.end()) continue;
      for (std::size_t k = i; k < i + len; ++k)
        tokens[k].gazetteerTags.insert(it->second.begin(), it->second.end());
    }
  }
}

// ---- Baseline POS tagger + chunker ----

namespace {

const std::map<std::string, std::string>& builtin_lexicon() {
  static const std::map<std::string, std::string> lex = {
      {"the", "DT"},    {"a", "DT"},       {"an", "DT"},      {"this", "DT"},
      {"that", "DT"},   {"these", "DT"},   {"those", "DT"},   {"no", "DT"},
      {"his", "PRP$"},  {"her", "PRP$"},   {"its", "PRP$"},   {"their", "PRP$"},
      {"my", "PRP$"},   {"our", "PRP$"},   {"your", "PRP$"},
      {"he", "PRP"},    {"she", "PRP"},    {"it", "PRP"},     {"they", "PRP"},
      {"we", "PRP"},    {"i", "PRP"},      {"you", "PRP"},    {"him", "PRP"},
      {"them", "PRP"},  {"us", "PRP"},
      {"in", "IN"},     {"on", "IN"},      {"at", "IN"},      {"of", "IN"},
      {"for", "IN"},    {"with", "IN"},    {"without", "IN"}, {"after", "IN"},
      {"before", "IN"}, {"during", "IN"},  {"since", "IN"},   {"until", "IN"},
      {"from", "IN"},   {"to", "TO"},      {"by", "IN"},      {"post", "IN"},
      {"per", "IN"},
      {"and", "CC"},    {"or", "CC"},      {"but", "CC"},     {"nor", "CC"},
      {"both", "CC"},
      {"is", "VBZ"},    {"are", "VBP"},    {"was", "VBD"},    {"were", "VBD"},
      {"be", "VB"},     {"been", "VBN"},   {"has", "VBZ"},    {"have", "VBP"},
      {"had", "VBD"},   {"does", "VBZ"},   {"do", "VBP"},     {"did", "VBD"},
      {"denies", "VBZ"},{"reports", "VBZ"},{"reported", "VBD"},
      {"received", "VBD"},{"noted", "VBD"},{"showed", "VBD"}, {"revealed", "VBD"},
      {"underwent", "VBD"},{"started", "VBD"},{"admitted", "VBD"},
      {"discharged", "VBD"},{"given", "VBN"},{"denied", "VBD"},
      {"severe", "JJ"}, {"mild", "JJ"},    {"acute", "JJ"},   {"chronic", "JJ"},
      {"elevated", "JJ"},{"normal", "JJ"}, {"abnormal", "JJ"},{"left", "JJ"},
      {"right", "JJ"},  {"upper", "JJ"},   {"lower", "JJ"},   {"stable", "JJ"},
      {"not", "RB"},    {"very", "RB"},
      {".", "."},       {",", ","},        {";", ":"},        {":", ":"},
      {"?", "."},       {"!", "."},        {"(", "-LRB-"},    {")", "-RRB-"},
  };
  return lex;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

bool is_noun_like(const std::string& pos) {
  return pos == "NN" || pos == "NNS" || pos == "NNP" || pos == "NNPS" || pos == "CD" ||
         pos == "JJ" || pos == "JJR" || pos == "JJS" || pos == "DT" || pos == "PRP$" ||
         pos == "PRP";
}

bool is_verb(const std::string& pos) { return pos.rfind("VB", 0) == 0 || pos == "MD"; }

}  // namespace

BaselineTagger::BaselineTagger() : lexicon_(builtin_lexicon()) {}

BaselineTagger::BaselineTagger(const std::string& lexiconFile) : lexicon_(builtin_lexicon()) {
  std::ifstream in(lexiconFile);
  if (!in) throw std::runtime_error("cannot open POS lexicon " + lexiconFile);
  std::string line;
  while (std::getline(in, line)) {
    line = text::trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() >= 2) lexicon_[text::to_lower(f[0])] = f[1];
  }
}

std::string BaselineTagger::lookup(const Token& t, bool sentenceInitial) const {
  auto it = lexicon_.find(text::to_lower(t.text));
  if (it != lexicon_.end()) return it->second;
  if (t.kind == TokenKind::Number) return "CD";
  if (t.kind == TokenKind::Punctuation) return t.text == "," ? "," : ".";
  if (t.kind == TokenKind::Symbol) return "SYM";
  const std::string lower = text::to_lower(t.text);
  if (ends_with(lower, "ly")) return "RB";
  if (ends_with(lower, "ing") && lower.size() > 4) return "VBG";
  if (ends_with(lower, "ed") && lower.size() > 3) return "VBD";
  if (ends_with(lower, "ous") || ends_with(lower, "ful") || ends_with(lower, "ive") ||
      ends_with(lower, "ic") || ends_with(lower, "al"))
    return "JJ";
  // Unknown capitalized word mid-sentence: proper-noun fallback.
  if (!sentenceInitial &&
      (t.tcase == TokenCase::UpperInitial || t.tcase == TokenCase::UpperCase))
    return "NNP";
  if (ends_with(lower, "s") && !ends_with(lower, "ss") && lower.size() > 3) return "NNS";
  return "NN";
}

void BaselineTagger::tag(std::vector<Token>& tokens, const Sentence& s) const {
  for (std::size_t i = s.firstToken; i < s.endToken; ++i)
    tokens[i].pos = lookup(tokens[i], i == s.firstToken);
  // Chunker: maximal runs of noun-like tags -> NP, verb runs -> VP.
  bool inNp = false, inVp = false;
  for (std::size_t i = s.firstToken; i < s.endToken; ++i) {
    const std::string& pos = tokens[i].pos;
    if (is_noun_like(pos)) {
      tokens[i].chunk = inNp ? "I-NP" : "B-NP";
      inNp = true;
      inVp = false;
    } else if (is_verb(pos)) {
      tokens[i].chunk = inVp ? "I-VP" : "B-VP";
      inVp = true;
      inNp = false;
    } else {
      tokens[i].chunk = "O";
      inNp = inVp = false;
    }
  }
}

void preprocess(AnnotatedDocument& ad, const Gazetteer& gaz, const PosTagger& tagger) {
  ad.tokens = tokenize(ad.doc.text, gaz.abbreviations());
  ad.sentences = split_sentences(ad.doc.text, ad.tokens);
  fill_stems(ad.tokens);
  for (const auto& s : ad.sentences) tagger.tag(ad.tokens, s);
  gaz.tag(ad.tokens);
}

}  // namespace clintime::preproc
