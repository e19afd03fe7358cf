#include "seapath/time.hpp"

#include <cmath>
#include <cstdlib>

namespace seapath {

template <class Tag>
std::string Fixed<Tag>::str() const {
  const std::int64_t v = ticks_;
  const bool neg = v < 0;
  // Magnitude via unsigned arithmetic so that INT64_MIN cannot overflow.
  const std::uint64_t mag = neg ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
  std::string frac = std::to_string(mag % kScale);
  frac.insert(0, 3 - frac.size(), '0');
  return (neg ? "-" : "") + std::to_string(mag / kScale) + "." + frac;
}

template <class Tag>
Fixed<Tag> Fixed<Tag>::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty decimal literal");
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    ++i;
  }
  std::int64_t whole = 0;
  std::size_t digits = 0;
  for (; i < text.size() && text[i] != '.'; ++i, ++digits) {
    const char c = text[i];
    if (c < '0' || c > '9') throw std::invalid_argument("bad decimal literal: " + std::string(text));
    if (whole > std::numeric_limits<std::int64_t>::max() / 10 / kScale)
      throw std::invalid_argument("decimal literal out of range: " + std::string(text));
    whole = whole * 10 + (c - '0');
  }
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (i < text.size()) {
    ++i;  // '.'
    for (; i < text.size(); ++i, ++frac_digits) {
      const char c = text[i];
      if (c < '0' || c > '9') throw std::invalid_argument("bad decimal literal: " + std::string(text));
      if (frac_digits >= 3) throw std::invalid_argument("more than three fractional digits: " + std::string(text));
      frac = frac * 10 + (c - '0');
    }
  }
  if (digits == 0 && frac_digits == 0) throw std::invalid_argument("bad decimal literal: " + std::string(text));
  for (std::size_t k = frac_digits; k < 3; ++k) frac *= 10;
  const std::int64_t t = whole * kScale + frac;
  return Fixed(neg ? -t : t);
}

template <class Tag>
Fixed<Tag> Fixed<Tag>::from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite quantity");
  return Fixed(static_cast<std::int64_t>(std::llround(v * kScale)));
}

template class Fixed<TimeTag>;
template class Fixed<DistanceTag>;
template class Fixed<SpeedTag>;

Time travel_time(Distance d, Speed s) {
  if (s.ticks() <= 0) throw std::invalid_argument("speed must be positive");
  if (d.ticks() <= 0) return Time::zero();
  // d[milli-units] / s[milli-units per unit] = units; scaled by 1000 for ticks.
  const std::int64_t num = d.ticks() * Time::kScale;
  const std::int64_t q = num / s.ticks();
  return Time::from_ticks(num % s.ticks() == 0 ? q : q + 1);
}

std::string to_string(const Interval& iv) {
  return "[" + iv.start.str() + "," + iv.end.str() + ")";
}

}  // namespace seapath
