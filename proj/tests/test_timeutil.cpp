#include <doctest.h>

#include <random>

#include "mobsense/timeutil.hpp"

using namespace mobsense;

TEST_CASE("iso8601 parse and format") {
  CHECK(parse_iso8601("2018-03-05T00:00:00Z") == 1520208000);
  CHECK(parse_iso8601("2018-03-05T10:00:00+10:00") == 1520208000);
  CHECK(parse_iso8601("2018-03-04T14:00:00-10:00") == 1520208000);
  CHECK(parse_iso8601("2018-03-05T00:00:00.123Z") == 1520208000);
  CHECK(format_iso8601_utc(1520208000) == "2018-03-05T00:00:00Z");

  CHECK_FALSE(parse_iso8601("2018-03-05T00:00:00").has_value());  // offset required
  CHECK_FALSE(parse_iso8601("not a time").has_value());
  CHECK_FALSE(parse_iso8601("2018-13-05T00:00:00Z").has_value());
}

TEST_CASE("tz offset parsing") {
  CHECK(parse_tz_offset_minutes("+10:00") == 600);
  CHECK(parse_tz_offset_minutes("-09:30") == -570);
  CHECK(parse_tz_offset_minutes("Z") == 0);
  CHECK(parse_tz_offset_minutes("+0930") == 570);
  CHECK(parse_tz_offset_minutes("+5") == 300);
  CHECK_FALSE(parse_tz_offset_minutes("10:00").has_value());
  CHECK_FALSE(parse_tz_offset_minutes("+25:00").has_value());
  CHECK(format_tz_offset(600) == "+10:00");
  CHECK(format_tz_offset(-570) == "-09:30");
}

TEST_CASE("local date and hour under an offset") {
  const std::int64_t ts = 1520208000;  // 2018-03-05T00:00:00Z
  CHECK(local_hour(ts, 600) == 10);
  CHECK(local_date_index(ts, 600) == days_from_civil(2018, 3, 5));
  // 15:00Z on Mar 5 is 01:00 on Mar 6 in +10:00.
  CHECK(local_hour(ts + 15 * 3600, 600) == 1);
  CHECK(local_date_index(ts + 15 * 3600, 600) == days_from_civil(2018, 3, 6));
  CHECK(format_date(days_from_civil(2018, 3, 6)) == "2018-03-06");
  // Negative offsets shift the date backwards across midnight.
  CHECK(local_date_index(ts, -60) == days_from_civil(2018, 3, 4));
}

TEST_CASE("round trip over random timestamps") {
  std::mt19937_64 gen(42);
  std::uniform_int_distribution<std::int64_t> dist(0, 4102444800LL);  // 1970..2100
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t ts = dist(gen);
    auto parsed = parse_iso8601(format_iso8601_utc(ts));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == ts);
  }
}
