#ifndef CLINTIME_TESTS_NORM_FIXTURE_HPP
#define CLINTIME_TESTS_NORM_FIXTURE_HPP

// Normalization fixture: surface forms with expected TIMEX3 values. Relative
// dates are checked against std::chrono calendar arithmetic, independent of
// the library's own civil-date code.

#include <chrono>
#include <string>
#include <vector>

#include "clintime/types.hpp"

namespace normfix {

inline constexpr const char* kAnchor = "2012-03-10";  // a Saturday

// ---- std::chrono reference arithmetic ----

inline std::chrono::year_month_day anchor_ymd() {
  using namespace std::chrono;
  return year_month_day{year{2012}, month{3}, day{10}};
}

inline std::string iso(const std::chrono::year_month_day& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

inline std::string anchor_plus_days(int n) {
  using namespace std::chrono;
  return iso(year_month_day{sys_days{anchor_ymd()} + days{n}});
}

inline std::string anchor_plus_months(int n) {
  using namespace std::chrono;
  year_month_day d = anchor_ymd() + months{n};
  if (!d.ok()) d = d.year() / d.month() / last;  // clamp to month end
  return iso(d);
}

// Most recent weekday with the given ISO index (1 = Monday) on or before
// the anchor.
inline std::string weekday_on_or_before(unsigned isoWeekday) {
  using namespace std::chrono;
  sys_days d{anchor_ymd()};
  while (weekday{d}.iso_encoding() != isoWeekday) d -= days{1};
  return iso(year_month_day{d});
}

// ---- fixture rows ----

struct NormCase {
  std::string surface;
  clintime::TimexType type;
  std::string value;
  clintime::TimexModifier modifier = clintime::TimexModifier::NA;
};

inline std::vector<NormCase> cases() {
  using clintime::TimexModifier;
  using clintime::TimexType;
  const std::string a = kAnchor;
  std::vector<NormCase> v = {
      // absolute dates
      {"01/04/1988", TimexType::Date, "1988-01-04"},
      {"01/04/88", TimexType::Date, "1988-01-04"},       // two-digit year, 1900s side
      {"01/04/12", TimexType::Date, "2012-01-04"},       // two-digit year, 2000s side
      {"1994/28/12", TimexType::Date, "1994-12-28"},     // year/day/month order
      {"25/12/1995", TimexType::Date, "1995-12-25"},     // day-first tolerated
      {"2003-05-07", TimexType::Date, "2003-05-07"},
      {"11/22", TimexType::Date, "2012-11-22"},          // anchored to the anchor year
      {"1987", TimexType::Date, "1987"},
      {"June 1990", TimexType::Date, "1990-06"},
      {"October 12, 1994", TimexType::Date, "1994-10-12"},
      {"July 4 2001", TimexType::Date, "2001-07-04"},
      {"January", TimexType::Date, "2012-01"},
      {"first of June", TimexType::Date, "2012-06-01"},
      // relative dates (chrono oracle)
      {"today", TimexType::Date, a},
      {"now", TimexType::Date, a},
      {"yesterday", TimexType::Date, anchor_plus_days(-1)},
      {"tomorrow", TimexType::Date, anchor_plus_days(1)},
      {"3 days ago", TimexType::Date, anchor_plus_days(-3)},
      {"two weeks ago", TimexType::Date, anchor_plus_days(-14)},
      {"five days later", TimexType::Date, anchor_plus_days(5)},
      {"4 weeks from now", TimexType::Date, anchor_plus_days(28)},
      {"two months ago", TimexType::Date, anchor_plus_months(-2)},
      {"one year earlier", TimexType::Date, anchor_plus_months(-12)},
      {"six days prior", TimexType::Date, anchor_plus_days(-6)},
      {"postoperative day 3", TimexType::Date, anchor_plus_days(2)},  // day one = anchor
      {"hospital day one", TimexType::Date, anchor_plus_days(0)},
      {"Friday", TimexType::Date, weekday_on_or_before(5)},
      {"Monday", TimexType::Date, weekday_on_or_before(1)},
      {"Saturday", TimexType::Date, weekday_on_or_before(6)},  // the anchor itself
      // times
      {"8:30", TimexType::Time, a + "T08:30"},
      {"8:30 pm", TimexType::Time, a + "T20:30"},
      {"12:00 am", TimexType::Time, a + "T00:00"},
      {"11:15 am", TimexType::Time, a + "T11:15"},
      {"morning", TimexType::Time, a + "T09:00"},
      {"noon", TimexType::Time, a + "T12:00"},
      {"afternoon", TimexType::Time, a + "T15:00"},
      {"evening", TimexType::Time, a + "T19:00"},
      {"midnight", TimexType::Time, a + "T00:00"},
      // durations
      {"two weeks", TimexType::Duration, "P2W"},
      {"3 days", TimexType::Duration, "P3D"},
      {"five months", TimexType::Duration, "P5M"},
      {"one year", TimexType::Duration, "P1Y"},
      {"24 hours", TimexType::Duration, "PT24H"},
      {"90 minutes", TimexType::Duration, "PT90M"},
      // frequencies
      {"qd", TimexType::Frequency, "RP24H"},
      {"bid", TimexType::Frequency, "RP12H"},
      {"tid", TimexType::Frequency, "RP8H"},
      {"qid", TimexType::Frequency, "RP6H"},
      {"qod", TimexType::Frequency, "RP48H"},
      {"q6h", TimexType::Frequency, "RP6H"},
      {"twice daily", TimexType::Frequency, "RP12H"},
      {"three times a day", TimexType::Frequency, "RP8H"},
      {"weekly", TimexType::Frequency, "RP7D"},
      // modifiers
      {"about two weeks", TimexType::Duration, "P2W", TimexModifier::Approx},
      {"more than three days", TimexType::Duration, "P3D", TimexModifier::More},
      {"less than two weeks", TimexType::Duration, "P2W", TimexModifier::Less},
      {"early June", TimexType::Date, "2012-06", TimexModifier::Start},
      {"late June", TimexType::Date, "2012-06", TimexModifier::End},
  };
  return v;
}

}  // namespace normfix

#endif
