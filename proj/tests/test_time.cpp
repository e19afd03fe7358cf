#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "seapath/time.hpp"

using namespace seapath;

TEST_CASE("decimal literals round-trip through str") {
  CHECK(Time::parse("2").ticks() == 2000);
  CHECK(Time::parse("2.5").ticks() == 2500);
  CHECK(Time::parse("-0.125").ticks() == -125);
  CHECK(Time::parse(".5").ticks() == 500);
  CHECK(Time::parse("2.5").str() == "2.500");
  CHECK(Time::from_ticks(-500).str() == "-0.500");
  CHECK_THROWS(Time::parse(""));
  CHECK_THROWS(Time::parse("1.2345"));
  CHECK_THROWS(Time::parse("1x"));
  CHECK_THROWS(Time::parse("."));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto t = Time::from_ticks(static_cast<std::int64_t>(rng() % 2000000000) - 1000000000);
    CHECK(Time::parse(t.str()) == t);
  }
}

TEST_CASE("travel time rounds up to a whole tick") {
  CHECK(travel_time(Distance::from_units(10), Speed::from_units(5)) == Time::from_units(2));
  CHECK(travel_time(Distance::from_units(1), Speed::from_units(3)).ticks() == 334);
  CHECK(travel_time(Distance::zero(), Speed::from_units(3)) == Time::zero());
  CHECK_THROWS(travel_time(Distance::from_units(1), Speed::zero()));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 5000; ++i) {
    const auto d = static_cast<std::int64_t>(rng() % 100000) + 1;
    const auto s = static_cast<std::int64_t>(rng() % 10000) + 1;
    const auto t = travel_time(Distance::from_ticks(d), Speed::from_ticks(s)).ticks();
    // t is the least tick count with t * s >= d * 1000.
    CHECK(t * s >= d * 1000);
    CHECK((t - 1) * s < d * 1000);
  }
}

TEST_CASE("half-open intervals") {
  const Interval a{Time::from_units(0), Time::from_units(2)};
  const Interval b{Time::from_units(2), Time::from_units(3)};
  const Interval c{Time::from_ticks(1999), Time::from_units(3)};
  CHECK_FALSE(intersects(a, b));
  CHECK(intersects(a, c));
  CHECK(a.contains(Time::zero()));
  CHECK_FALSE(a.contains(Time::from_units(2)));
  CHECK(covering(a, b) == Interval{Time::zero(), Time::from_units(3)});
  CHECK(to_string(a) == "[0.000,2.000)");
  CHECK(Interval{Time::from_units(1), Time::from_units(1)}.empty());
}
