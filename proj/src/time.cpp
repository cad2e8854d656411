#include "mymove/time.hpp"

#include <charconv>
#include <cstdio>

#include <fmt/format.h>

#include "mymove/errors.hpp"

namespace mymove {

using namespace std::chrono;

Instant floor_hour(Instant t) { return std::chrono::floor<hours>(t); }
Instant floor_minute(Instant t) { return std::chrono::floor<minutes>(t); }
Instant floor_day(Instant t) { return std::chrono::floor<days>(t); }

std::string format_iso(Instant t) {
  auto day = floor<days>(t);
  year_month_day ymd{day};
  hh_mm_ss<Millis> tod{t - day};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", int(ymd.year()),
                     unsigned(ymd.month()), unsigned(ymd.day()), tod.hours().count(),
                     tod.minutes().count(), tod.seconds().count(), tod.subseconds().count());
}

std::string format_date(Instant t) {
  year_month_day ymd{floor<days>(t)};
  return fmt::format("{:04}-{:02}-{:02}", int(ymd.year()), unsigned(ymd.month()),
                     unsigned(ymd.day()));
}

namespace {

[[noreturn]] void bad(std::string_view text) {
  throw Error(ErrorCode::kInvalidArgument, fmt::format("malformed time '{}'", text));
}

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  if (pos + len > text.size()) bad(whole);
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') bad(whole);
    v = v * 10 + (c - '0');
  }
  return v;
}

sys_days parse_ymd(std::string_view text, std::string_view whole) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') bad(whole);
  year_month_day ymd{year{read_int(text, 0, 4, whole)},
                     month{unsigned(read_int(text, 5, 2, whole))},
                     day{unsigned(read_int(text, 8, 2, whole))}};
  if (!ymd.ok()) bad(whole);
  return sys_days{ymd};
}

}  // namespace

Instant parse_date(std::string_view text) {
  if (text.size() != 10) bad(text);
  return Instant{parse_ymd(text, text)};
}

Instant parse_iso(std::string_view text) {
  std::string_view s = text;
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
  else if (s.size() > 6 && (s.substr(s.size() - 6) == "+00:00")) s.remove_suffix(6);
  if (s.size() < 16 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') bad(text);
  auto day = parse_ymd(s, text);
  int hh = read_int(s, 11, 2, text);
  int mm = read_int(s, 14, 2, text);
  int ss = 0, ms = 0;
  std::size_t pos = 16;
  if (pos < s.size()) {
    if (s[pos] != ':') bad(text);
    ss = read_int(s, pos + 1, 2, text);
    pos += 3;
    if (pos < s.size()) {
      if (s[pos] != '.') bad(text);
      std::size_t digits = s.size() - pos - 1;
      if (digits == 0 || digits > 9) bad(text);
      int frac = read_int(s, pos + 1, digits, text);
      for (std::size_t i = digits; i < 3; ++i) frac *= 10;
      for (std::size_t i = 3; i < digits; ++i) frac /= 10;
      ms = frac;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) bad(text);
  return Instant{day} + hours{hh} + minutes{mm} + seconds{ss} + Millis{ms};
}

int parse_hhmm(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 2 || text.size() != colon + 3)
    bad(text);
  int h = read_int(text, 0, colon, text);
  int m = read_int(text, colon + 1, 2, text);
  if (h > 24 || m > 59 || (h == 24 && m != 0)) bad(text);
  return h * 60 + m;
}

std::string format_hhmm(int minutes_of_day) {
  return fmt::format("{:02}:{:02}", minutes_of_day / 60, minutes_of_day % 60);
}

double minutes_between(Instant a, Instant b) {
  return duration<double, std::ratio<60>>(b - a).count();
}

}  // namespace mymove
