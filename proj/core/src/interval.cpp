#include "hetbounds/interval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hetbounds/error.hpp"

namespace hetbounds {

Interval Interval::checked(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw InvalidInput("interval endpoints must be finite");
  }
  if (lower > upper) {
    throw InvalidInput("interval lower end exceeds upper end: " +
                       to_string(Interval{lower, upper}));
  }
  return Interval{lower, upper};
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lower, b.lower);
  const double hi = std::min(a.upper, b.upper);
  if (lo > hi) return std::nullopt;
  return Interval{lo, hi};
}

std::string to_string(const Interval& iv) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%.6g, %.6g]", iv.lower, iv.upper);
  return buf;
}

}  // namespace hetbounds
