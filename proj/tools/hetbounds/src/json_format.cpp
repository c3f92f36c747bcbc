#include "hetbounds_cli/json_format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace hetbounds::cli {

double canonical_double(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kJsonSignificantDigits, x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return canonical_double(x);
}

json interval_json(const Interval& iv) {
  return json::array({number(iv.lower), number(iv.upper)});
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

std::string fixed3(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

}  // namespace hetbounds::cli
