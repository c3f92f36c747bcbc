#pragma once

#include <optional>
#include <string>

namespace hetbounds {

/// Closed real interval [lower, upper] with lower <= upper.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  /// Throws InvalidInput unless both ends are finite and lower <= upper.
  static Interval checked(double lower, double upper);

  double width() const noexcept { return upper - lower; }
  double midpoint() const noexcept { return 0.5 * (lower + upper); }
  bool contains(double x, double tol = 0.0) const noexcept {
    return x >= lower - tol && x <= upper + tol;
  }
  bool contains(const Interval& other, double tol = 0.0) const noexcept {
    return other.lower >= lower - tol && other.upper <= upper + tol;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Intersection, or nullopt when the intervals are disjoint.
std::optional<Interval> intersect(const Interval& a, const Interval& b);

std::string to_string(const Interval& iv);

}  // namespace hetbounds
