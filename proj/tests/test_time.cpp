#include <doctest.h>

#include "mymove/errors.hpp"
#include "mymove/time.hpp"

using namespace mymove;
using namespace std::chrono;

TEST_CASE("iso timestamps round-trip with millisecond precision") {
  Instant t = from_epoch_ms(1'620'641'400'123LL);
  CHECK(format_iso(t) == "2021-05-10T10:10:00.123Z");
  CHECK(parse_iso(format_iso(t)) == t);
  CHECK(parse_iso("2021-05-10T10:10") == from_epoch_ms(1'620'641'400'000LL));
  CHECK(parse_iso("2021-05-10T10:10:00+00:00") == from_epoch_ms(1'620'641'400'000LL));
}

TEST_CASE("malformed timestamps are rejected") {
  for (const char* bad : {"", "2021-05-10", "2021-13-10T10:00", "2021-05-10T25:00", "yesterday", "2021-05-10T10:00:00+02:00"})
    CHECK_THROWS_AS(parse_iso(bad), Error);
}

TEST_CASE("floors and dates") {
  Instant t = parse_iso("2021-05-10T23:59:59.999Z");
  CHECK(format_iso(floor_hour(t)) == "2021-05-10T23:00:00.000Z");
  CHECK(format_iso(floor_minute(t)) == "2021-05-10T23:59:00.000Z");
  CHECK(format_date(t) == "2021-05-10");
  CHECK(format_date(t + milliseconds{1}) == "2021-05-11");
  CHECK(parse_date("2021-05-10") == floor_day(t));
  CHECK_THROWS_AS(parse_date("2021-5-10"), Error);
}

TEST_CASE("hh:mm") {
  CHECK(parse_hhmm("07:30") == 450);
  CHECK(parse_hhmm("00:00") == 0);
  CHECK(format_hhmm(450) == "07:30");
  CHECK(parse_hhmm("24:00") == 1440);  // end of day
  CHECK_THROWS_AS(parse_hhmm("24:01"), Error);
  CHECK_THROWS_AS(parse_hhmm("7h30"), Error);
  CHECK(minutes_between(parse_iso("2021-05-10T10:00"), parse_iso("2021-05-10T10:30")) == doctest::Approx(30.0));
}

TEST_CASE("intervals are half-open") {
  Interval iv{parse_iso("2021-05-10T10:00"), parse_iso("2021-05-10T11:00")};
  CHECK(iv.contains(iv.start));
  CHECK_FALSE(iv.contains(iv.end));
  CHECK(iv.length() == hours{1});
  CHECK(Interval{iv.end, iv.start}.empty());
}
