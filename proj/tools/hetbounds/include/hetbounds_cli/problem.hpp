#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hetbounds/bounds.hpp"
#include "hetbounds/estimator.hpp"
#include "hetbounds/rho_matrix.hpp"
#include "hetbounds_cli/json_format.hpp"

namespace hetbounds::cli {

/// One requested pin: exactly one of value / fraction is set.
struct PinRequest {
  std::string setting;
  std::optional<double> value;
  std::optional<double> fraction;
};

/// A fully resolved problem: settings, bias bounds and a rho matrix.
struct ProblemFile {
  std::vector<SettingEstimate> estimates;
  std::vector<BiasBound> nus;
  RhoMatrix rho;
  bool symmetric = false;
  double epsilon = 1e-6;
  EpsilonMode epsilon_mode = EpsilonMode::Relative;
  std::vector<PinRequest> pins;
  /// Notes raised while resolving (e.g. rho intervals that miss 1).
  std::vector<std::string> warnings;

  std::vector<std::string> labels() const;
};

/// Parses a problem document. Relative file references (rho CSV,
/// supershort dataset) resolve against `base_dir`.
///
///   {"settings": [{"label", "theta_s", "nu_l", "nu_u"}...],
///    "rho": {"matrix": [[...]]} | {"pairs": [...]} | {"csv": path}
///         | {"decay": {"base", "positions"}}
///         | {"adjacency": {"value", "pairs", "point"}}
///         | {"supershort": {"b_ss": {...}} | {"data", "outcome", ...}},
///    "options": {"symmetric", "epsilon", "epsilon_mode"},
///    "pins": [{"setting", "value"|"fraction"}]}
ProblemFile parse_problem(const json& doc, const std::filesystem::path& base_dir = {});
ProblemFile load_problem(const std::filesystem::path& path);

/// Canonical problem document with the rho matrix in pair form. Parsing
/// the result reproduces the same problem.
json problem_to_json(const ProblemFile& p);

/// 64-bit FNV-1a of the canonical problem document, as 16 hex digits.
std::string content_hash(const ProblemFile& p);

PinRequest parse_pin_request(const json& j);
RegressionSpec parse_regression_spec(const json& j);

}  // namespace hetbounds::cli
