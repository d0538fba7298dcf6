#include "clintime/event_extractor.hpp"

#include <algorithm>
#include <fstream>

#include "clintime/text.hpp"

namespace clintime::events {

PostprocessConfig PostprocessConfig::defaults() {
  PostprocessConfig cfg;
  cfg.fpLexicon = {"he",  "she", "it",  "they", "we",   "i",    "you", "him", "her",
                   "them", "us",  "his", "its",  "their", "the", "a",  "an",  "this",
                   "that", "these", "those", "was", "is", "and", "or", "of"};
  cfg.boundaryPosTags = {"NN", "NNS", "NNP", "NNPS", "JJ", "JJR", "JJS", "DT", "PRP$", "CD"};
  cfg.boundaryChunkTags = {"B-NP", "I-NP"};
  return cfg;
}

std::set<std::string> PostprocessConfig::load_fp_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FP lexicon " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = text::trim(line);
    if (line.empty() || line[0] == '#') continue;
    out.insert(text::to_lower(line));
  }
  return out;
}

namespace {

std::vector<std::string> label_fix_pass(const std::vector<std::string>& seq) {
  std::vector<std::string> out = seq;
  const std::size_t n = out.size();
  auto prev = [&](std::size_t i) -> std::string { return i == 0 ? "" : out[i - 1]; };
  auto rawNext = [&](std::size_t i) -> std::string { return i + 1 < n ? seq[i + 1] : ""; };

  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = prev(i);
    const std::string& c = out[i];
    const std::string nx = rawNext(i);
    if (c == "O" && nx == "I") {
      // rule a: mark the boundary before an I-run; rules b/c: extend an
      // open mention through the gap
      out[i] = (p == "B" || p == "I") ? "I" : "B";
    } else if (c == "O" && p == "B" && nx == "O" &&
               (i < 2 || out[i - 2] != "I")) {
      // rule b: a standalone B is extended one token to the right; does not
      // apply when the next token opens another mention
      out[i] = "I";
    } else if (c == "I") {
      if (p == "W") {
        out[i - 1] = "B";  // W cannot be followed by I; reopen as B..I
      } else if (p != "B" && p != "I") {
        out[i] = "B";  // sequence-initial I (no O available to promote)
      }
    } else if (c == "B" && p == "I" && nx == "I") {
      out[i] = "I";  // rule d: B splitting a run is absorbed
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> label_fix(const std::vector<std::string>& seq, crf::SchemaKind kind) {
  // a rewrite can expose another one to its left (e.g. rule a turning an O
  // into I makes rule d applicable), so scan to a fixpoint
  std::vector<std::string> out = seq;
  for (std::size_t pass = 0; pass <= out.size(); ++pass) {
    std::vector<std::string> next = label_fix_pass(out);
    if (next == out) break;
    out = std::move(next);
  }
  if (kind == crf::SchemaKind::WBIO) {
    // single-token mentions are W under W-BIO
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i] == "B" && (i + 1 == out.size() || out[i + 1] != "I")) out[i] = "W";
  }
  return out;
}

crf::TokenRange boundary_adjust(crf::TokenRange mention, const std::vector<Token>& tokens,
                                const Sentence& sentence, const PostprocessConfig& cfg) {
  auto expandable = [&](std::size_t t) {
    return cfg.boundaryPosTags.count(tokens[t].pos) ||
           cfg.boundaryChunkTags.count(tokens[t].chunk);
  };
  while (mention.first > sentence.firstToken && expandable(mention.first - 1)) --mention.first;
  while (mention.second < sentence.endToken && expandable(mention.second)) ++mention.second;
  return mention;
}

std::vector<EventMention> fp_filter(std::vector<EventMention> mentions, const std::string& docText,
                                    const PostprocessConfig& cfg) {
  std::vector<EventMention> out;
  for (auto& m : mentions) {
    std::string surface = text::to_lower(text::slice(docText, m.span));
    if (text::codepoint_length(surface) <= 1) continue;
    if (cfg.fpLexicon.count(surface)) continue;
    out.push_back(std::move(m));
  }
  return out;
}

// ---- Negation ----

NegationConfig NegationConfig::defaults() {
  NegationConfig cfg;
  auto fwd = [&](const std::string& t, int scope = 6) {
    NegationRule r;
    for (const auto& tok : text::split(t, ' ')) r.trigger.push_back(tok);
    r.direction = NegationDirection::Forward;
    r.scopeLimit = scope;
    cfg.rules.push_back(r);
  };
  auto bwd = [&](const std::string& t, int scope = 6) {
    NegationRule r;
    for (const auto& tok : text::split(t, ' ')) r.trigger.push_back(tok);
    r.direction = NegationDirection::Backward;
    r.scopeLimit = scope;
    cfg.rules.push_back(r);
  };
  fwd("no");
  fwd("no evidence of");
  fwd("no sign of");
  fwd("no signs of");
  fwd("denies");
  fwd("denied");
  fwd("without");
  fwd("negative for");
  fwd("not");
  fwd("free of");
  fwd("absence of");
  fwd("rules out");
  fwd("ruled out");
  bwd("was ruled out");
  bwd("is ruled out");
  bwd("was negative");
  bwd("is absent");
  cfg.terminators = {"but", "however", "although", "though", "except", "aside",
                     "apart", "which", ";"};
  return cfg;
}

NegationConfig NegationConfig::load(const std::string& triggerFile,
                                    const std::string& terminatorFile) {
  NegationConfig cfg;
  std::ifstream in(triggerFile);
  if (!in) throw std::runtime_error("cannot open negation trigger file " + triggerFile);
  std::string line;
  while (std::getline(in, line)) {
    line = text::trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 3) throw std::runtime_error("bad negation rule line: " + line);
    NegationRule r;
    for (const auto& tok : text::split(text::to_lower(f[0]), ' ')) r.trigger.push_back(tok);
    if (f[1] == "Forward")
      r.direction = NegationDirection::Forward;
    else if (f[1] == "Backward")
      r.direction = NegationDirection::Backward;
    else if (f[1] == "Bidirectional")
      r.direction = NegationDirection::Bidirectional;
    else
      throw std::runtime_error("bad negation direction: " + f[1]);
    r.scopeLimit = std::stoi(f[2]);
    if (r.scopeLimit <= 0 || r.trigger.empty())
      throw std::runtime_error("bad negation rule line: " + line);
    cfg.rules.push_back(r);
  }
  std::ifstream tin(terminatorFile);
  if (!tin) throw std::runtime_error("cannot open terminator file " + terminatorFile);
  while (std::getline(tin, line)) {
    line = text::trim(line);
    if (line.empty() || line[0] == '#') continue;
    cfg.terminators.insert(text::to_lower(line));
  }
  return cfg;
}

namespace {

bool trigger_matches(const std::vector<Token>& tokens, std::size_t at, std::size_t endToken,
                     const std::vector<std::string>& trigger) {
  if (at + trigger.size() > endToken) return false;
  for (std::size_t k = 0; k < trigger.size(); ++k)
    if (text::to_lower(tokens[at + k].text) != trigger[k]) return false;
  return true;
}

}  // namespace

void detect_negation(std::vector<EventMention>& mentions, const std::vector<Token>& tokens,
                     const Sentence& sentence, const NegationConfig& cfg) {
  // token index ranges covered by some trigger scope
  std::vector<std::pair<std::size_t, std::size_t>> scopes;
  for (std::size_t i = sentence.firstToken; i < sentence.endToken; ++i) {
    for (const auto& rule : cfg.rules) {
      if (!trigger_matches(tokens, i, sentence.endToken, rule.trigger)) continue;
      if (rule.direction == NegationDirection::Forward ||
          rule.direction == NegationDirection::Bidirectional) {
        std::size_t from = i + rule.trigger.size();
        std::size_t to = from;
        while (to < sentence.endToken && to - from < static_cast<std::size_t>(rule.scopeLimit)) {
          if (cfg.terminators.count(text::to_lower(tokens[to].text))) break;
          ++to;
        }
        if (to > from) scopes.emplace_back(from, to);
      }
      if (rule.direction == NegationDirection::Backward ||
          rule.direction == NegationDirection::Bidirectional) {
        std::size_t to = i;
        std::size_t from = to;
        while (from > sentence.firstToken &&
               to - (from - 1) <= static_cast<std::size_t>(rule.scopeLimit)) {
          if (cfg.terminators.count(text::to_lower(tokens[from - 1].text))) break;
          --from;
        }
        if (to > from) scopes.emplace_back(from, to);
      }
    }
  }
  if (scopes.empty()) return;

  for (auto& m : mentions) {
    // token range of the mention
    std::size_t first = sentence.endToken, end = sentence.firstToken;
    for (std::size_t t = sentence.firstToken; t < sentence.endToken; ++t) {
      if (tokens[t].span.overlaps(m.span)) {
        first = std::min(first, t);
        end = std::max(end, t + 1);
      }
    }
    if (first >= end) continue;  // mention not in this sentence
    for (const auto& [sFrom, sTo] : scopes) {
      if (first >= sFrom && end <= sTo) {
        m.negated = true;
        break;
      }
    }
  }
}

// ---- Full extraction ----

crf::FeatureMatrix event_feature_matrix(const std::vector<Token>& tokens, const Sentence& s) {
  crf::FeatureMatrix m;
  for (std::size_t t = s.firstToken; t < s.endToken; ++t) {
    const Token& tok = tokens[t];
    m.rows.push_back({std::to_string(t - s.firstToken), tok.text, tok.stem, tok.pos, tok.chunk});
  }
  return m;
}

std::vector<EventMention> extract_events(const AnnotatedDocument& ad, const CategoryModels& models,
                                         const PostprocessConfig& cfg) {
  std::vector<EventMention> out;
  int nextId = 1;
  for (const auto& [catName, model] : models.byCategory) {
    EventCategory cat = event_category_from(catName);
    for (const auto& sentence : ad.sentences) {
      crf::FeatureMatrix m = event_feature_matrix(ad.tokens, sentence);
      std::vector<std::string> seq = model.decode(m);
      if (cfg.enableLabelFixer) seq = label_fix(seq, model.schema().kind);
      auto ranges = crf::decode_labels(seq, model.schema());
      for (auto r : ranges) {
        crf::TokenRange abs{r.first + sentence.firstToken, r.second + sentence.firstToken};
        if (cfg.enableBoundaryAdjust) abs = boundary_adjust(abs, ad.tokens, sentence, cfg);
        EventMention ev;
        ev.span = {ad.tokens[abs.first].span.start, ad.tokens[abs.second - 1].span.end};
        ev.category = cat;
        out.push_back(ev);
      }
    }
  }
  if (cfg.enableFpFilter) out = fp_filter(std::move(out), ad.doc.text, cfg);
  std::sort(out.begin(), out.end(), [](const EventMention& a, const EventMention& b) {
    if (!(a.span == b.span)) return a.span < b.span;
    return a.category < b.category;
  });
  // drop exact duplicates within a category (may arise after boundary adjust)
  out.erase(std::unique(out.begin(), out.end(),
                        [](const EventMention& a, const EventMention& b) {
                          return a.span == b.span && a.category == b.category;
                        }),
            out.end());
  for (auto& ev : out) ev.id = "E" + std::to_string(nextId++);
  return out;
}

}  // namespace clintime::events
