#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hetbounds/polytope.hpp"
#include "hetbounds/rho_matrix.hpp"
#include "hetbounds_cli/json_format.hpp"
#include "hetbounds_cli/problem.hpp"

namespace hetbounds::cli {

struct UnivariateRow {
  std::string setting;
  double estimate = 0.0;
  std::optional<Interval> projected;  ///< absent when infeasible
  Interval original;
  bool lower_raised = false;
  bool upper_lowered = false;
};

struct PinTable {
  PinRequest request;
  PinResult result;
};

/// Everything a solve run reports.
struct ReportBundle {
  bool feasible = false;
  bool symmetric = false;
  std::vector<UnivariateRow> univariate_table;
  std::vector<PinTable> pin_tables;
  std::vector<TransitivityViolation> violations;
  std::vector<std::string> warnings;
};

inline constexpr const char* kInfeasibleNotice =
    "The joint identified set is empty: no effect vector satisfies every bias "
    "bound and rho bound at once. Loosen some of them and solve again.";

/// Solves, audits and evaluates the problem's pins.
ReportBundle make_report(const ProblemFile& problem);
ReportBundle make_report(const ProblemFile& problem, const SolvedPolytope& solved,
                         const std::vector<PinRequest>& pins);

/// Resolves a pin request (value or fraction) against a graph.
PinResult run_pin(const ConstraintGraph& graph, const PinRequest& request);

json report_to_json(const ReportBundle& r);
std::string report_to_text(const ReportBundle& r);
std::string report_to_svg(const ReportBundle& r);

json pin_result_to_json(const PinResult& p);
json solved_to_json(const SolvedPolytope& s);
json violations_to_json(const std::vector<TransitivityViolation>& v);

/// Text table of one pin: setting, conditional lower, conditional upper.
std::string pin_table_text(const PinTable& t);

}  // namespace hetbounds::cli
