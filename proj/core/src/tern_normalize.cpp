#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <regex>

#include "clintime/tern.hpp"
#include "clintime/text.hpp"

namespace clintime::tern {

namespace {

// days_from_civil / civil_from_days after Howard Hinnant's algorithms
long long days_from_civil_impl(int y, int m, int d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

CivilDate civil_from_days(long long z) {
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long long y = static_cast<long long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

bool valid_ymd(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static const int md[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int dim = md[m - 1];
  if (m == 2 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) dim = 29;
  return d <= dim;
}

const std::map<std::string, int>& month_names() {
  static const std::map<std::string, int> m = {
      {"january", 1},   {"jan", 1},  {"february", 2}, {"feb", 2},  {"march", 3},
      {"mar", 3},       {"april", 4}, {"apr", 4},      {"may", 5},  {"june", 6},
      {"jun", 6},       {"july", 7}, {"jul", 7},      {"august", 8}, {"aug", 8},
      {"september", 9}, {"sep", 9},  {"sept", 9},     {"october", 10}, {"oct", 10},
      {"november", 11}, {"nov", 11}, {"december", 12}, {"dec", 12}};
  return m;
}

const std::map<std::string, int>& number_words() {
  static const std::map<std::string, int> m = {
      {"a", 1},     {"an", 1},       {"one", 1},     {"two", 2},      {"three", 3},
      {"four", 4},  {"five", 5},     {"six", 6},     {"seven", 7},    {"eight", 8},
      {"nine", 9},  {"ten", 10},     {"eleven", 11}, {"twelve", 12},  {"thirteen", 13},
      {"fourteen", 14}, {"fifteen", 15}, {"sixteen", 16}, {"seventeen", 17},
      {"eighteen", 18}, {"nineteen", 19}, {"twenty", 20}, {"thirty", 30},
      {"forty", 40}, {"fifty", 50}};
  return m;
}

std::optional<int> parse_number_token(const std::string& w) {
  if (!w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    if (w.size() > 4) return std::nullopt;
    return std::stoi(w);
  }
  auto it = number_words().find(w);
  if (it != number_words().end()) return it->second;
  // ordinals for "postoperative day one/first" style expressions
  static const std::map<std::string, int> ord = {
      {"first", 1}, {"second", 2}, {"third", 3},  {"fourth", 4}, {"fifth", 5},
      {"sixth", 6}, {"seventh", 7}, {"eighth", 8}, {"ninth", 9}, {"tenth", 10}};
  auto o = ord.find(w);
  if (o != ord.end()) return o->second;
  return std::nullopt;
}

// DURATION unit suffix: ("D", 3) means P3D; hour/minute units carry the T part.
std::optional<std::string> duration_unit(const std::string& w) {
  std::string s = w;
  if (s.size() > 1 && s.back() == 's') s.pop_back();
  if (s == "day") return "D";
  if (s == "week") return "W";
  if (s == "month") return "M";
  if (s == "year") return "Y";
  if (s == "hour") return "TH";
  if (s == "minute") return "TM";
  // clinical shorthand units; these appear as separate tokens ("24 h")
  // because the tokenizer splits letter/digit boundaries
  if (s == "h" || s == "hr") return "TH";
  if (s == "min") return "TM";
  if (s == "d") return "D";
  if (s == "wk") return "W";
  if (s == "mo") return "M";
  if (s == "yr") return "Y";
  return std::nullopt;
}

std::string duration_value(int n, const std::string& unit) {
  if (unit[0] == 'T') return "PT" + std::to_string(n) + unit.substr(1);
  return "P" + std::to_string(n) + unit;
}

// Clinical frequency shorthands and their repetition-interval encodings.
const std::map<std::string, std::string>& frequency_shorthands() {
  static const std::map<std::string, std::string> m = {
      {"qd", "RP24H"},   {"q.d.", "RP24H"}, {"od", "RP24H"},   {"qod", "RP48H"},
      {"bid", "RP12H"},  {"b.i.d.", "RP12H"}, {"tid", "RP8H"}, {"t.i.d.", "RP8H"},
      {"qid", "RP6H"},   {"q.i.d.", "RP6H"}, {"daily", "RP24H"}, {"nightly", "RP24H"},
      {"hourly", "RP1H"}, {"weekly", "RP7D"}, {"monthly", "RP1M"}, {"prn", "RP24H"}};
  return m;
}

struct Working {
  std::vector<std::string> words;  // lowercased token texts inside the span
  TimexModifier modifier = TimexModifier::NA;
};

Working gather(const TimexMention& mention, const std::vector<Token>& tokens) {
  Working w;
  for (const auto& t : tokens)
    if (t.span.overlaps(mention.span)) w.words.push_back(text::to_lower(t.text));
  if (w.words.empty()) throw UnnormalizableExpression();

  // peel approximators / interval-edge markers off the front
  auto& ws = w.words;
  auto starts = [&](std::initializer_list<const char*> seq) {
    std::size_t i = 0;
    for (const char* s : seq) {
      if (i >= ws.size() || ws[i] != s) return static_cast<std::size_t>(0);
      ++i;
    }
    return i;
  };
  std::size_t n = 0;
  if ((n = starts({"more", "than"})) || (n = starts({"greater", "than"})) ||
      (n = starts({"over"})))
    w.modifier = TimexModifier::More;
  else if ((n = starts({"less", "than"})) || (n = starts({"under"})) ||
           (n = starts({"almost"})) || (n = starts({"nearly"})))
    w.modifier = TimexModifier::Less;
  else if ((n = starts({"about"})) || (n = starts({"approximately"})) ||
           (n = starts({"around"})) || (n = starts({"roughly"})))
    w.modifier = TimexModifier::Approx;
  else if ((n = starts({"early"})))
    w.modifier = TimexModifier::Start;
  else if ((n = starts({"mid"})) || (n = starts({"middle", "of"})))
    w.modifier = TimexModifier::Mid;
  else if ((n = starts({"late"})) || (n = starts({"end", "of"})))
    w.modifier = TimexModifier::End;
  ws.erase(ws.begin(), ws.begin() + n);
  if (ws.empty()) throw UnnormalizableExpression();
  return w;
}

struct Resolved {
  TimexType ttype;
  std::string value;
};

std::optional<Resolved> try_frequency(const std::vector<std::string>& ws) {
  if (ws.size() == 1) {
    auto it = frequency_shorthands().find(ws[0]);
    if (it != frequency_shorthands().end()) return Resolved{TimexType::Frequency, it->second};
    // qNh shorthand: every N hours
    std::smatch sm;
    static const std::regex qnh(R"(^q(\d{1,2})h$)");
    if (std::regex_match(ws[0], sm, qnh))
      return Resolved{TimexType::Frequency, "RP" + sm[1].str() + "H"};
  }
  // "q 6 h" as split by the tokenizer at letter/digit boundaries
  if (ws.size() == 3 && ws[0] == "q" && ws[2] == "h") {
    if (auto n = parse_number_token(ws[1]))
      return Resolved{TimexType::Frequency, "RP" + std::to_string(*n) + "H"};
  }
  auto per_day = [](int times) {
    switch (times) {
      case 1: return std::string("RP24H");
      case 2: return std::string("RP12H");
      case 3: return std::string("RP8H");
      case 4: return std::string("RP6H");
      default: return "R" + std::to_string(times) + "P24H";
    }
  };
  auto times_count = [](const std::string& w) -> std::optional<int> {
    if (w == "once") return 1;
    if (w == "twice") return 2;
    return std::nullopt;
  };
  // "twice daily", "once a day", "three times a day", "three times daily"
  if (ws.size() >= 2) {
    std::optional<int> times = times_count(ws[0]);
    std::size_t i = 1;
    if (!times) {
      times = parse_number_token(ws[0]);
      if (times && i < ws.size() && ws[i] == "times") ++i; else if (times && ws[0] != "1") {
        // bare "<n> daily" is not a frequency idiom
      }
    }
    if (times && i < ws.size()) {
      if (ws[i] == "daily" && i + 1 == ws.size()) return Resolved{TimexType::Frequency, per_day(*times)};
      if ((ws[i] == "a" || ws[i] == "per") && i + 2 == ws.size() && ws[i + 1] == "day")
        return Resolved{TimexType::Frequency, per_day(*times)};
      if ((ws[i] == "a" || ws[i] == "per") && i + 2 == ws.size() && ws[i + 1] == "week")
        return Resolved{TimexType::Frequency,
                        *times == 1 ? std::string("RP7D") : "R" + std::to_string(*times) + "P7D"};
    }
  }
  // "every N hours/days", "every morning", "every day"
  if (ws.size() >= 2 && ws[0] == "every") {
    if (ws.size() == 2) {
      if (ws[1] == "day" || ws[1] == "morning" || ws[1] == "evening" || ws[1] == "night" ||
          ws[1] == "afternoon")
        return Resolved{TimexType::Frequency, "RP24H"};
      if (ws[1] == "week") return Resolved{TimexType::Frequency, "RP7D"};
      if (ws[1] == "month") return Resolved{TimexType::Frequency, "RP1M"};
      if (ws[1] == "hour") return Resolved{TimexType::Frequency, "RP1H"};
    }
    if (ws.size() == 3) {
      auto n = parse_number_token(ws[1]);
      auto u = duration_unit(ws[2]);
      if (n && u) {
        // hour/minute periods drop the ISO "T" in this encoding (RP24H style)
        std::string p = duration_value(*n, *u);
        if (p.rfind("PT", 0) == 0) p.erase(1, 1);
        return Resolved{TimexType::Frequency, "R" + p};
      }
    }
  }
  return std::nullopt;
}

std::optional<Resolved> try_duration(const std::vector<std::string>& ws) {
  // "<n> <unit>" with optional trailing "long"/"period"
  std::vector<std::string> v = ws;
  while (!v.empty() && (v.back() == "long" || v.back() == "period")) v.pop_back();
  if (v.size() == 2) {
    auto n = parse_number_token(v[0]);
    auto u = duration_unit(v[1]);
    if (n && u) return Resolved{TimexType::Duration, duration_value(*n, *u)};
  }
  if (v.size() == 1) {
    // glued forms like "24h", "3d"
    std::smatch sm;
    static const std::regex glued(R"(^(\d{1,3})(h|d|w|mo|y)$)");
    if (std::regex_match(v[0], sm, glued)) {
      int n = std::stoi(sm[1]);
      std::string u = sm[2];
      if (u == "h") return Resolved{TimexType::Duration, duration_value(n, "TH")};
      if (u == "d") return Resolved{TimexType::Duration, duration_value(n, "D")};
      if (u == "w") return Resolved{TimexType::Duration, duration_value(n, "W")};
      if (u == "mo") return Resolved{TimexType::Duration, duration_value(n, "M")};
      if (u == "y") return Resolved{TimexType::Duration, duration_value(n, "Y")};
    }
  }
  return std::nullopt;
}

CivilDate anchor_of(const NormContext& ctx) {
  auto d = parse_iso_date(ctx.sectionAnchor.value_or(ctx.anchorDate));
  if (!d) d = parse_iso_date(ctx.anchorDate);
  if (!d) throw UnnormalizableExpression();
  return *d;
}

CivilDate shift_months(const CivilDate& d, int months) {
  int m0 = (d.year * 12 + d.month - 1) + months;
  CivilDate out{m0 / 12, m0 % 12 + 1, d.day};
  while (out.day > 28 && !valid_ymd(out.year, out.month, out.day)) --out.day;
  return out;
}

std::optional<Resolved> try_date(const std::vector<std::string>& ws, const NormContext& ctx) {
  const CivilDate anchor = anchor_of(ctx);
  char buf[16];

  if (ws.size() == 1) {
    const std::string& w = ws[0];
    if (w == "today" || w == "now") return Resolved{TimexType::Date, anchor.iso()};
    if (w == "yesterday") return Resolved{TimexType::Date, add_days(anchor, -1).iso()};
    if (w == "tomorrow") return Resolved{TimexType::Date, add_days(anchor, 1).iso()};
    if (auto iso = parse_iso_date(w)) return Resolved{TimexType::Date, iso->iso()};

    std::smatch sm;
    static const std::regex mdY(R"(^(\d{1,2})[/-](\d{1,2})[/-](\d{4})$)");
    static const std::regex mdy(R"(^(\d{1,2})[/-](\d{1,2})[/-](\d{2})$)");
    static const std::regex Ymd(R"(^(\d{4})/(\d{1,2})/(\d{1,2})$)");
    static const std::regex md(R"(^(\d{1,2})/(\d{1,2})$)");
    if (std::regex_match(w, sm, mdY) || std::regex_match(w, sm, mdy)) {
      int m = std::stoi(sm[1]), d = std::stoi(sm[2]);
      int y = std::stoi(sm[3]);
      if (sm[3].str().size() == 2) y = pivot_two_digit_year(y);
      if (!valid_ymd(y, m, d)) {
        // tolerate DD/MM order when MM/DD is invalid
        if (valid_ymd(y, d, m)) std::swap(m, d);
        else return std::nullopt;
      }
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
      return Resolved{TimexType::Date, buf};
    }
    if (std::regex_match(w, sm, Ymd)) {
      int y = std::stoi(sm[1]), a = std::stoi(sm[2]), b = std::stoi(sm[3]);
      int m = a, d = b;
      if (!valid_ymd(y, m, d) && valid_ymd(y, b, a)) { m = b; d = a; }
      if (!valid_ymd(y, m, d)) return std::nullopt;
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
      return Resolved{TimexType::Date, buf};
    }
    if (std::regex_match(w, sm, md)) {
      int m = std::stoi(sm[1]), d = std::stoi(sm[2]);
      if (!valid_ymd(anchor.year, m, d)) return std::nullopt;
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", anchor.year, m, d);
      return Resolved{TimexType::Date, buf};
    }
    static const std::regex yyyy(R"(^(1[89]\d{2}|20\d{2})$)");
    if (std::regex_match(w, sm, yyyy)) return Resolved{TimexType::Date, sm[1].str()};

    auto mo = month_names().find(w);
    if (mo != month_names().end()) {
      std::snprintf(buf, sizeof buf, "%04d-%02d", anchor.year, mo->second);
      return Resolved{TimexType::Date, buf};
    }
    // weekday name: most recent such day on or before the anchor
    static const std::array<std::string, 7> wd = {"monday",   "tuesday", "wednesday", "thursday",
                                                  "friday",   "saturday", "sunday"};
    for (std::size_t i = 0; i < wd.size(); ++i) {
      std::string abbr = wd[i].substr(0, 3);
      if (w == wd[i] || w == abbr || w == abbr + ".") {
        long long z = days_from_civil(anchor);
        int anchorWd = static_cast<int>(((z % 7) + 10) % 7);  // 0 = Monday; epoch day is a Thursday
        int back = (anchorWd - static_cast<int>(i) + 7) % 7;
        return Resolved{TimexType::Date, add_days(anchor, -back).iso()};
      }
    }
  }

  // strip a leading "on"/"the" and trailing "," glue from multiword dates
  std::vector<std::string> v;
  for (const auto& w : ws)
    if (w != "," && w != "the" && w != "of" && w != "on") v.push_back(w);

  // Month D [Y], D Month [Y], Month Y; a parse failure here only skips this
  // reading so the relative-date forms below still get their turn
  auto month_style = [&]() -> std::optional<Resolved> {
    if (v.size() < 2) return std::nullopt;
    auto strip_ord = [](std::string w) {
      for (const char* suf : {"st", "nd", "rd", "th"})
        if (w.size() > 2 && w.ends_with(suf) &&
            std::isdigit(static_cast<unsigned char>(w[w.size() - 3])))
          return w.substr(0, w.size() - 2);
      return w;
    };
    int mi = -1, day = -1, year = -1;
    for (const auto& raw : v) {
      std::string w = strip_ord(raw);
      auto mo = month_names().find(w);
      if (mo != month_names().end() && mi < 0) { mi = mo->second; continue; }
      auto n = parse_number_token(w);
      if (!n) return std::nullopt;
      if (*n >= 1000) year = *n;
      else if (w.size() == 2 && day >= 0 && year < 0) year = pivot_two_digit_year(*n);
      else if (day < 0) day = *n;
      else return std::nullopt;
    }
    if (mi > 0) {
      if (day > 0) {
        int y = year > 0 ? year : anchor.year;
        if (!valid_ymd(y, mi, day)) return std::nullopt;
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, mi, day);
        return Resolved{TimexType::Date, buf};
      }
      if (year > 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02d", year, mi);
        return Resolved{TimexType::Date, buf};
      }
    }
    return std::nullopt;
  };
  if (auto r = month_style()) return r;

  // "<n> <unit> ago", "<n> <unit> earlier/later/from now"
  if (v.size() >= 3) {
    auto n = parse_number_token(v[0]);
    auto u = duration_unit(v[1]);
    bool back = v.back() == "ago" || v.back() == "earlier" || v.back() == "prior" ||
                v.back() == "before";
    bool fwd = v.back() == "later" || (v.size() >= 4 && v[v.size() - 2] == "from" &&
                                       v.back() == "now");
    if (n && u && (back || fwd)) {
      int sign = back ? -1 : 1;
      CivilDate res;
      if (*u == "D") res = add_days(anchor, sign * *n);
      else if (*u == "W") res = add_days(anchor, sign * *n * 7);
      else if (*u == "M") res = shift_months(anchor, sign * *n);
      else if (*u == "Y") res = shift_months(anchor, sign * *n * 12);
      else return std::nullopt;
      return Resolved{TimexType::Date, res.iso()};
    }
  }

  // "postoperative day N", "hospital day N" — day one is the anchor day
  if (v.size() >= 2) {
    std::size_t di = 0;
    if (v[0] == "postoperative" || v[0] == "post-operative" || v[0] == "hospital" ||
        v[0] == "postop")
      di = 1;
    else if (v.size() >= 3 && v[0] == "post" && (v[1] == "operative" || v[1] == "op"))
      di = 2;
    if (di > 0 && di + 1 < v.size() && v[di] == "day") {
      auto n = parse_number_token(v[di + 1]);
      if (n) return Resolved{TimexType::Date, add_days(anchor, *n - 1).iso()};
    }
  }
  return std::nullopt;
}

std::optional<Resolved> try_time(const std::vector<std::string>& ws, const NormContext& ctx) {
  const CivilDate anchor = anchor_of(ctx);
  char buf[24];
  auto emit = [&](int h, int mi) {
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d", anchor.iso().c_str(), h, mi);
    return Resolved{TimexType::Time, buf};
  };

  // "2:23", "14:05:30", optional trailing am/pm token
  static const std::regex clock(R"(^(\d{1,2}):(\d{2})(?::\d{2})?$)");
  std::smatch sm;
  if (!ws.empty() && std::regex_match(ws[0], sm, clock)) {
    int h = std::stoi(sm[1]), mi = std::stoi(sm[2]);
    if (h > 23 || mi > 59) return std::nullopt;
    if (ws.size() == 2) {
      std::string ap = ws[1];
      ap.erase(std::remove(ap.begin(), ap.end(), '.'), ap.end());
      if (ap == "pm" && h < 12) h += 12;
      else if (ap == "am" && h == 12) h = 0;
      else if (ap != "am" && ap != "pm") return std::nullopt;
    } else if (ws.size() > 2) {
      return std::nullopt;
    }
    return emit(h, mi);
  }

  // parts of day at representative hours
  std::vector<std::string> v = ws;
  CivilDate date = anchor;
  if (!v.empty() && (v[0] == "this" || v[0] == "that")) v.erase(v.begin());
  if (!v.empty() && v[0] == "yesterday") { date = add_days(anchor, -1); v.erase(v.begin()); }
  if (!v.empty() && v[0] == "tomorrow") { date = add_days(anchor, 1); v.erase(v.begin()); }
  if (v.size() == 1) {
    static const std::map<std::string, int> rep = {{"morning", 9},  {"noon", 12},
                                                   {"midday", 12},  {"afternoon", 15},
                                                   {"evening", 19}, {"night", 23},
                                                   {"midnight", 0}};
    auto it = rep.find(v[0]);
    if (it != rep.end()) {
      std::snprintf(buf, sizeof buf, "%sT%02d:00", date.iso().c_str(), it->second);
      return Resolved{TimexType::Time, buf};
    }
  }
  return std::nullopt;
}

}  // namespace

std::string CivilDate::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<CivilDate> parse_iso_date(const std::string& s) {
  static const std::regex iso(R"(^(\d{4})-(\d{2})-(\d{2})$)");
  std::smatch sm;
  if (!std::regex_match(s, sm, iso)) return std::nullopt;
  CivilDate d{std::stoi(sm[1]), std::stoi(sm[2]), std::stoi(sm[3])};
  if (!valid_ymd(d.year, d.month, d.day)) return std::nullopt;
  return d;
}

long long days_from_civil(const CivilDate& d) { return days_from_civil_impl(d.year, d.month, d.day); }

CivilDate add_days(const CivilDate& d, long long days) {
  return civil_from_days(days_from_civil(d) + days);
}

int pivot_two_digit_year(int yy) { return yy >= 30 ? 1900 + yy : 2000 + yy; }

TimexMention normalize(TimexMention mention, const std::vector<Token>& tokens,
                       const NormContext& ctx) {
  try {
    Working w = gather(mention, tokens);
    mention.modifier = w.modifier;
    std::optional<Resolved> r = try_frequency(w.words);
    if (!r) r = try_time(w.words, ctx);
    if (!r) r = try_date(w.words, ctx);
    if (!r) r = try_duration(w.words);
    if (!r) throw UnnormalizableExpression();
    mention.ttype = r->ttype;
    mention.value = r->value;
  } catch (const UnnormalizableExpression&) {
    mention.value = "UNK";
  }
  return mention;
}

bool value_well_formed(TimexType t, const std::string& value) {
  static const std::regex date(R"(^\d{4}(-\d{2}(-\d{2})?)?$)");
  static const std::regex time(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}$)");
  static const std::regex period(R"(^P(\d+[YMWD])*(T(\d+[HMS])+)?$)");
  static const std::regex freq(R"(^R\d*/?P(\d+[YMWDH])+(T(\d+[HMS])+)?$)");
  switch (t) {
    case TimexType::Date:
      return std::regex_match(value, date);
    case TimexType::Time:
      return std::regex_match(value, time);
    case TimexType::Duration:
      return std::regex_match(value, period) && value != "P";
    case TimexType::Frequency:
      return std::regex_match(value, freq);
  }
  return false;
}

}  // namespace clintime::tern
