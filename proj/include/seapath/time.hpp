#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seapath {

/// Fixed-point quantity with a resolution of 1/1000 unit.
///
/// Times, durations, lengths and speeds all use this representation so that
/// interval comparisons are exact and runs are reproducible bit for bit.
template <class Tag>
class Fixed {
public:
  static constexpr std::int64_t kScale = 1000;

  constexpr Fixed() = default;

  static constexpr Fixed from_ticks(std::int64_t ticks) { return Fixed(ticks); }
  static constexpr Fixed from_units(std::int64_t units) { return Fixed(units * kScale); }
  static constexpr Fixed max() { return Fixed(std::numeric_limits<std::int64_t>::max() / 4); }
  static constexpr Fixed zero() { return Fixed(0); }

  constexpr std::int64_t ticks() const { return ticks_; }
  constexpr double as_double() const { return static_cast<double>(ticks_) / kScale; }

  constexpr auto operator<=>(const Fixed&) const = default;

  constexpr Fixed operator+(Fixed o) const { return Fixed(ticks_ + o.ticks_); }
  constexpr Fixed operator-(Fixed o) const { return Fixed(ticks_ - o.ticks_); }
  constexpr Fixed& operator+=(Fixed o) { ticks_ += o.ticks_; return *this; }
  constexpr Fixed& operator-=(Fixed o) { ticks_ -= o.ticks_; return *this; }
  constexpr Fixed operator*(std::int64_t k) const { return Fixed(ticks_ * k); }

  /// Decimal rendering with exactly three fractional digits ("2.000", "-0.500").
  std::string str() const;

  /// Parses a decimal literal with at most three fractional digits.
  static Fixed parse(std::string_view text);

  /// Rounds a double to the nearest tick.
  static Fixed from_double(double v);

private:
  constexpr explicit Fixed(std::int64_t t) : ticks_(t) {}
  std::int64_t ticks_ = 0;
};

struct TimeTag {};
struct DistanceTag {};
struct SpeedTag {};

using Time = Fixed<TimeTag>;
using Distance = Fixed<DistanceTag>;
using Speed = Fixed<SpeedTag>;

/// Time needed to cover `d` at speed `s`, rounded up to the next tick.
Time travel_time(Distance d, Speed s);

inline Time gcd(Time a, Time b) {
  return Time::from_ticks(std::gcd(a.ticks(), b.ticks()));
}

/// Half-open time interval [start, end).
struct Interval {
  Time start;
  Time end;

  constexpr bool empty() const { return !(start < end); }
  constexpr Time length() const { return end - start; }
  constexpr bool contains(Time t) const { return start <= t && t < end; }

  constexpr auto operator<=>(const Interval&) const = default;
};

/// Non-empty intersection of two half-open intervals; touching intervals do not intersect.
constexpr bool intersects(const Interval& a, const Interval& b) {
  return a.start < b.end && b.start < a.end;
}

constexpr Interval covering(const Interval& a, const Interval& b) {
  return {a.start < b.start ? a.start : b.start, a.end < b.end ? b.end : a.end};
}

std::string to_string(const Interval& iv);

}  // namespace seapath

template <class Tag>
struct std::hash<seapath::Fixed<Tag>> {
  std::size_t operator()(const seapath::Fixed<Tag>& f) const noexcept {
    return std::hash<std::int64_t>{}(f.ticks());
  }
};
