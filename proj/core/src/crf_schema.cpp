#include <algorithm>

#include "clintime/crf.hpp"

namespace clintime::crf {

SchemaKind schema_kind_from(const std::string& s) {
  if (s == "IO") return SchemaKind::IO;
  if (s == "BIO") return SchemaKind::BIO;
  if (s == "WBIO") return SchemaKind::WBIO;
  throw std::runtime_error("unknown schema kind '" + s + "'");
}

std::string to_string(SchemaKind k) {
  switch (k) {
    case SchemaKind::IO: return "IO";
    case SchemaKind::BIO: return "BIO";
    case SchemaKind::WBIO: return "WBIO";
  }
  return "?";
}

std::vector<std::string> LabelSchema::labels() const {
  switch (kind) {
    case SchemaKind::IO: return {"I", "O"};
    case SchemaKind::BIO: return {"B", "I", "O"};
    case SchemaKind::WBIO: return {"B", "I", "O", "W"};
  }
  return {};
}

bool LabelSchema::valid_start(const std::string& l) const {
  if (kind == SchemaKind::IO) return true;
  return l != "I";
}

bool LabelSchema::valid_transition(const std::string& from, const std::string& to) const {
  if (kind == SchemaKind::IO) return true;
  if (to == "I" && from != "B" && from != "I") return false;
  if (kind == SchemaKind::WBIO && from == "B" && to != "I") return false;
  return true;
}

bool LabelSchema::valid_end(const std::string& l) const {
  if (kind == SchemaKind::WBIO && l == "B") return false;
  return true;
}

bool LabelSchema::valid_sequence(const std::vector<std::string>& seq) const {
  if (seq.empty()) return true;
  auto known = labels();
  for (const auto& l : seq)
    if (std::find(known.begin(), known.end(), l) == known.end()) return false;
  if (!valid_start(seq.front()) || !valid_end(seq.back())) return false;
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (!valid_transition(seq[i - 1], seq[i])) return false;
  return true;
}

std::vector<std::string> encode_labels(std::vector<TokenRange> mentions, std::size_t nTokens,
                                       const LabelSchema& schema) {
  std::sort(mentions.begin(), mentions.end());
  for (std::size_t i = 1; i < mentions.size(); ++i)
    if (mentions[i].first < mentions[i - 1].second) throw OverlappingMentions();

  std::vector<std::string> seq(nTokens, "O");
  for (const auto& [first, end] : mentions) {
    if (first >= end || end > nTokens) throw std::out_of_range("mention outside token range");
    switch (schema.kind) {
      case SchemaKind::IO:
        for (std::size_t t = first; t < end; ++t) seq[t] = "I";
        break;
      case SchemaKind::BIO:
        seq[first] = "B";
        for (std::size_t t = first + 1; t < end; ++t) seq[t] = "I";
        break;
      case SchemaKind::WBIO:
        if (end - first == 1) {
          seq[first] = "W";
        } else {
          seq[first] = "B";
          for (std::size_t t = first + 1; t < end; ++t) seq[t] = "I";
        }
        break;
    }
  }
  return seq;
}

std::vector<TokenRange> decode_labels(const std::vector<std::string>& seq,
                                      const LabelSchema& schema) {
  std::vector<TokenRange> out;
  std::size_t open = seq.size();  // sentinel: no open mention
  auto close = [&](std::size_t end) {
    if (open < seq.size()) out.emplace_back(open, end);
    open = seq.size();
  };
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const std::string& l = seq[t];
    if (l == "O") {
      close(t);
    } else if (l == "W" && schema.kind == SchemaKind::WBIO) {
      close(t);
      out.emplace_back(t, t + 1);
    } else if (l == "B" && schema.kind != SchemaKind::IO) {
      close(t);
      open = t;
    } else {  // "I"
      if (schema.kind == SchemaKind::IO) {
        if (open == seq.size()) open = t;
      } else if (open == seq.size()) {
        open = t;  // orphan I starts a mention; repair lives downstream
      }
    }
  }
  close(seq.size());
  return out;
}

}  // namespace clintime::crf
