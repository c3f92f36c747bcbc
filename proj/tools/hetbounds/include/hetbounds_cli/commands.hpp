#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hetbounds/dataset.hpp"
#include "hetbounds/estimator.hpp"
#include "hetbounds_cli/json_format.hpp"
#include "hetbounds_cli/problem.hpp"
#include "hetbounds_cli/report.hpp"

namespace hetbounds::cli {

struct EstimateOptions {
  RegressionSpec spec;
  std::string by;
  /// Settings with fewer listwise-complete rows are skipped with a warning.
  std::size_t min_rows = 10;
  /// When set, each setting also gets the partial-R^2 bias bound [-b, b]
  /// from its benchmark partition at this strength multiplier.
  std::optional<double> strength;
  /// Also report b_ss with the control partitions swapped.
  bool partition_sensitivity = false;
};

struct EstimateRow {
  std::string setting;
  std::size_t rows = 0;
  std::optional<SupershortResult> result;
  std::optional<SupershortResult> swapped;
  std::optional<BenchmarkComponents> components;
  std::optional<BiasBound> nu;
  std::string error;  ///< nonempty when this setting failed
};

struct EstimateTable {
  std::vector<EstimateRow> rows;  ///< settings in order of first appearance
  std::vector<std::string> warnings;
};

/// Splits by the setting column and runs the short/supershort pair per
/// setting. A failing setting records its error; the others proceed.
EstimateTable run_estimate(const Dataset& data, const EstimateOptions& opts);
json estimate_to_json(const EstimateTable& t);
std::string estimate_to_text(const EstimateTable& t);

/// Runs every pin request against the solved problem.
std::vector<PinTable> run_pins(const ProblemFile& problem,
                               const std::vector<PinRequest>& pins);
json pins_to_json(const std::vector<PinTable>& tables);
std::string pins_to_text(const std::vector<PinTable>& tables);

/// Transitivity violations plus feasibility of the joint set.
json audit_to_json(const ProblemFile& problem);
std::string audit_to_text(const ProblemFile& problem);

}  // namespace hetbounds::cli
