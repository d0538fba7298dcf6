#include "clintime/standoff.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "clintime/text.hpp"

namespace clintime {

std::string to_string(EventCategory c) {
  switch (c) {
    case EventCategory::Problem: return "Problem";
    case EventCategory::Treatment: return "Treatment";
    case EventCategory::Test: return "Test";
  }
  return "?";
}

std::string to_string(TimexType t) {
  switch (t) {
    case TimexType::Date: return "Date";
    case TimexType::Time: return "Time";
    case TimexType::Duration: return "Duration";
    case TimexType::Frequency: return "Frequency";
  }
  return "?";
}

std::string to_string(TimexModifier m) {
  switch (m) {
    case TimexModifier::NA: return "NA";
    case TimexModifier::Approx: return "Approx";
    case TimexModifier::More: return "More";
    case TimexModifier::Less: return "Less";
    case TimexModifier::Start: return "Start";
    case TimexModifier::Mid: return "Mid";
    case TimexModifier::End: return "End";
  }
  return "?";
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Before: return "Before";
    case Relation::After: return "After";
    case Relation::Overlap: return "Overlap";
  }
  return "?";
}

std::string to_string(LinkOrigin o) {
  switch (o) {
    case LinkOrigin::Coordinate: return "Coordinate";
    case LinkOrigin::Prepositional: return "Prepositional";
    case LinkOrigin::Other: return "Other";
    case LinkOrigin::Sectime: return "Sectime";
    case LinkOrigin::Coref: return "Coref";
    case LinkOrigin::Closure: return "Closure";
  }
  return "?";
}

EventCategory event_category_from(const std::string& s) {
  if (s == "Problem") return EventCategory::Problem;
  if (s == "Treatment") return EventCategory::Treatment;
  if (s == "Test") return EventCategory::Test;
  throw ValidationError(s, "unknown event category");
}

TimexType timex_type_from(const std::string& s) {
  if (s == "Date") return TimexType::Date;
  if (s == "Time") return TimexType::Time;
  if (s == "Duration") return TimexType::Duration;
  if (s == "Frequency") return TimexType::Frequency;
  throw ValidationError(s, "unknown timex type");
}

TimexModifier timex_modifier_from(const std::string& s) {
  if (s == "NA") return TimexModifier::NA;
  if (s == "Approx") return TimexModifier::Approx;
  if (s == "More") return TimexModifier::More;
  if (s == "Less") return TimexModifier::Less;
  if (s == "Start") return TimexModifier::Start;
  if (s == "Mid") return TimexModifier::Mid;
  if (s == "End") return TimexModifier::End;
  throw ValidationError(s, "unknown timex modifier");
}

Relation relation_from(const std::string& s) {
  if (s == "Before") return Relation::Before;
  if (s == "After") return Relation::After;
  if (s == "Overlap") return Relation::Overlap;
  throw ValidationError(s, "unknown relation");
}

LinkOrigin link_origin_from(const std::string& s) {
  if (s == "Coordinate") return LinkOrigin::Coordinate;
  if (s == "Prepositional") return LinkOrigin::Prepositional;
  if (s == "Other") return LinkOrigin::Other;
  if (s == "Sectime") return LinkOrigin::Sectime;
  if (s == "Coref") return LinkOrigin::Coref;
  if (s == "Closure") return LinkOrigin::Closure;
  throw ValidationError(s, "unknown link origin");
}

bool is_sectime_anchor(const std::string& id) {
  return id == kStAdmission || id == kStDischarge || id == kStDct;
}

std::string to_string(GazetteerCategory c) {
  switch (c) {
    case GazetteerCategory::ClinicalFrequency: return "ClinicalFrequency";
    case GazetteerCategory::Duration: return "Duration";
    case GazetteerCategory::Festival: return "Festival";
    case GazetteerCategory::Season: return "Season";
    case GazetteerCategory::Weekday: return "Weekday";
    case GazetteerCategory::Month: return "Month";
    case GazetteerCategory::LiteralTime: return "LiteralTime";
    case GazetteerCategory::TemporalModifier: return "TemporalModifier";
    case GazetteerCategory::OrdinalNumber: return "OrdinalNumber";
    case GazetteerCategory::LiteralNumber: return "LiteralNumber";
  }
  return "?";
}

GazetteerCategory gazetteer_category_from(const std::string& s) {
  for (int i = 0; i < kGazetteerCategoryCount; ++i) {
    auto c = static_cast<GazetteerCategory>(i);
    if (to_string(c) == s) return c;
  }
  throw ValidationError(s, "unknown gazetteer category");
}

}  // namespace clintime

namespace clintime::standoff {

std::string escape_field(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      switch (s[i]) {
        case '\\': out.push_back('\\'); break;
        case 't': out.push_back('\t'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        default: out.push_back(s[i]);
      }
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

namespace {

std::int64_t parse_offset(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trail");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "bad offset '" + s + "'");
  }
}

}  // namespace

void validate(const AnnotatedDocument& ad) {
  if (ad.doc.id.empty()) throw ValidationError("", "document id is empty");
  const auto textLen = static_cast<std::int64_t>(text::codepoint_length(ad.doc.text));
  std::set<std::string> ids;
  auto checkSpan = [&](const std::string& id, const Span& sp) {
    if (!sp.valid()) throw ValidationError(id, "invalid span");
    if (sp.end > textLen) throw ValidationError(id, "span outside document text");
  };
  auto checkId = [&](const std::string& id) {
    if (id.empty()) throw ValidationError(id, "empty annotation id");
    if (!ids.insert(id).second) throw ValidationError(id, "duplicate annotation id");
  };
  for (const auto& e : ad.events) {
    checkId(e.id);
    checkSpan(e.id, e.span);
  }
  for (const auto& t : ad.timexes) {
    checkId(t.id);
    checkSpan(t.id, t.span);
  }
  for (const auto& l : ad.tlinks) {
    checkId(l.id);
    if (l.source == l.target) throw ValidationError(l.id, "self-referential link");
    for (const auto* anchor : {&l.source, &l.target}) {
      if (!is_sectime_anchor(*anchor) && !ids.count(*anchor))
        throw ValidationError(l.id, "dangling link anchor '" + *anchor + "'");
    }
  }
}

AnnotatedDocument read(std::istream& in) {
  AnnotatedDocument ad;
  std::string line;
  int lineNo = 0;
  bool sawDoc = false;

  auto nextLine = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineNo;
    return true;
  };

  while (nextLine()) {
    if (line.empty()) continue;
    if (line.rfind("#DOC ", 0) == 0) {
      ad.doc.id = line.substr(5);
      sawDoc = true;
    } else if (line.rfind("#META ", 0) == 0) {
      std::string kv = line.substr(6);
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError(lineNo, "#META without '='");
      ad.doc.meta[kv.substr(0, eq)] = kv.substr(eq + 1);
    } else if (line.rfind("#TEXT ", 0) == 0) {
      if (!sawDoc) throw ParseError(lineNo, "#TEXT before #DOC");
      int nLines = static_cast<int>(parse_offset(line.substr(6), lineNo));
      if (nLines < 1) throw ParseError(lineNo, "#TEXT line count must be >= 1");
      std::string text;
      for (int i = 0; i < nLines; ++i) {
        if (!nextLine()) throw ParseError(lineNo, "text block shorter than declared");
        if (i) text.push_back('\n');
        text += line;
      }
      ad.doc.text = text;
    } else if (line[0] == '#') {
      throw ParseError(lineNo, "unknown directive");
    } else {
      auto f = text::split(line, '\t');
      if (f.size() < 2) throw ParseError(lineNo, "too few fields");
      const std::string& kind = f[1];
      try {
        if (kind == "EVENT") {
          if (f.size() != 7) throw ParseError(lineNo, "EVENT needs 7 fields");
          EventMention e;
          e.id = f[0];
          e.category = event_category_from(f[2]);
          e.span = {parse_offset(f[3], lineNo), parse_offset(f[4], lineNo)};
          if (f[5] != "true" && f[5] != "false")
            throw ParseError(lineNo, "negated must be true|false");
          e.negated = f[5] == "true";
          std::string surface = unescape_field(f[6]);
          if (text::slice(ad.doc.text, e.span) != surface)
            throw ValidationError(e.id, "surface does not match span slice");
          ad.events.push_back(e);
        } else if (kind == "TIMEX") {
          if (f.size() != 8) throw ParseError(lineNo, "TIMEX needs 8 fields");
          TimexMention t;
          t.id = f[0];
          t.ttype = timex_type_from(f[2]);
          t.span = {parse_offset(f[3], lineNo), parse_offset(f[4], lineNo)};
          t.value = unescape_field(f[5]);
          t.modifier = timex_modifier_from(f[6]);
          std::string surface = unescape_field(f[7]);
          if (text::slice(ad.doc.text, t.span) != surface)
            throw ValidationError(t.id, "surface does not match span slice");
          ad.timexes.push_back(t);
        } else if (kind == "TLINK") {
          if (f.size() != 6) throw ParseError(lineNo, "TLINK needs 6 fields");
          TLink l;
          l.id = f[0];
          l.source = f[2];
          l.target = f[3];
          l.relation = relation_from(f[4]);
          l.origin = link_origin_from(f[5]);
          ad.tlinks.push_back(l);
        } else {
          throw ParseError(lineNo, "unknown annotation kind '" + kind + "'");
        }
      } catch (const ValidationError&) {
        throw;
      }
    }
  }
  if (!sawDoc) throw ParseError(lineNo, "missing #DOC header");
  validate(ad);
  return ad;
}

AnnotatedDocument read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read(in);
}

void write(const AnnotatedDocument& ad, std::ostream& out) {
  out << "#DOC " << ad.doc.id << "\n";
  for (const auto& [k, v] : ad.doc.meta) out << "#META " << k << "=" << v << "\n";
  auto lines = text::split(ad.doc.text, '\n');
  out << "#TEXT " << lines.size() << "\n";
  for (const auto& l : lines) out << l << "\n";

  auto events = ad.events;
  std::sort(events.begin(), events.end(), [](const EventMention& a, const EventMention& b) {
    if (!(a.span == b.span)) return a.span < b.span;
    return a.id < b.id;
  });
  for (const auto& e : events) {
    out << e.id << "\tEVENT\t" << to_string(e.category) << "\t" << e.span.start << "\t"
        << e.span.end << "\t" << (e.negated ? "true" : "false") << "\t"
        << escape_field(text::slice(ad.doc.text, e.span)) << "\n";
  }
  auto timexes = ad.timexes;
  std::sort(timexes.begin(), timexes.end(), [](const TimexMention& a, const TimexMention& b) {
    if (!(a.span == b.span)) return a.span < b.span;
    return a.id < b.id;
  });
  for (const auto& t : timexes) {
    out << t.id << "\tTIMEX\t" << to_string(t.ttype) << "\t" << t.span.start << "\t" << t.span.end
        << "\t" << escape_field(t.value) << "\t" << to_string(t.modifier) << "\t"
        << escape_field(text::slice(ad.doc.text, t.span)) << "\n";
  }
  auto tlinks = ad.tlinks;
  std::sort(tlinks.begin(), tlinks.end(), [](const TLink& a, const TLink& b) {
    return std::tie(a.source, a.target, a.id) < std::tie(b.source, b.target, b.id);
  });
  for (const auto& l : tlinks) {
    out << l.id << "\tTLINK\t" << l.source << "\t" << l.target << "\t" << to_string(l.relation)
        << "\t" << to_string(l.origin) << "\n";
  }
}

void write_file(const AnnotatedDocument& ad, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write(ad, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string to_string(const AnnotatedDocument& ad) {
  std::ostringstream os;
  write(ad, os);
  return os.str();
}

}  // namespace clintime::standoff
