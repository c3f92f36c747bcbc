#pragma once

#include <string>

#include "json.hpp"
#include "hetbounds/interval.hpp"

namespace hetbounds::cli {

using json = nlohmann::json;

/// Significant digits of every floating-point value in emitted JSON.
inline constexpr int kJsonSignificantDigits = 12;

/// Rounds to 12 significant digits and folds -0 into 0, so the serialized
/// form is the same on every platform.
double canonical_double(double x);
json number(double x);
json interval_json(const Interval& iv);

/// Objects keep sorted keys; two-space indent; trailing newline.
std::string dump_canonical(const json& j);

/// "%.3f" with -0.000 folded to 0.000, used by the text tables.
std::string fixed3(double x);

}  // namespace hetbounds::cli
