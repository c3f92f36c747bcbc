#include "hetbounds_cli/commands.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "hetbounds/error.hpp"

namespace hetbounds::cli {
namespace {

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

json supershort_json(const SupershortResult& r) {
  return {{"theta_s", number(r.theta_s)}, {"theta_ss", number(r.theta_ss)}, {"b_ss", number(r.b_ss)}};
}

}  // namespace

EstimateTable run_estimate(const Dataset& data, const EstimateOptions& opts) {
  if (!data.has_column(opts.by)) throw InvalidInput("unknown setting column '" + opts.by + "'");
  const auto labels = data.labels_of(opts.by);
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  std::size_t unlabeled = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) {
      ++unlabeled;
      continue;
    }
    auto [it, inserted] = groups.try_emplace(labels[i]);
    if (inserted) order.push_back(labels[i]);
    it->second.push_back(i);
  }

  EstimateTable t;
  if (unlabeled > 0) {
    t.warnings.push_back(std::to_string(unlabeled) + " row(s) with a missing '" + opts.by +
                         "' value were ignored");
  }
  for (const auto& label : order) {
    EstimateRow row;
    row.setting = label;
    row.rows = groups[label].size();
    if (row.rows < opts.min_rows) {
      t.warnings.push_back("setting '" + label + "' skipped: " + std::to_string(row.rows) +
                           " rows is below the minimum of " + std::to_string(opts.min_rows));
      continue;
    }
    try {
      const Dataset sub = data.select_rows(groups[label]);
      if (opts.partition_sensitivity) {
        const auto ps = partition_sensitivity(sub, opts.spec, label);
        row.result = ps.as_given;
        row.swapped = ps.swapped;
      } else {
        row.result = short_supershort(sub, opts.spec, label);
      }
      if (opts.strength) {
        row.components = benchmark_components(sub, opts.spec);
        row.nu = partial_r2_bias_bound(row.components->r2_d, row.components->r2_y,
                                       row.components->sd_y_resid, row.components->sd_d_resid,
                                       *opts.strength);
      }
    } catch (const Error& e) {
      row.result.reset();
      row.swapped.reset();
      row.error = e.what();
      t.warnings.push_back("setting '" + label + "' failed: " + e.what());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json estimate_to_json(const EstimateTable& t) {
  json rows = json::array();
  json settings = json::array();
  for (const auto& r : t.rows) {
    json j = {{"setting", r.setting}, {"rows", r.rows}};
    if (!r.error.empty()) {
      j["error"] = r.error;
    } else {
      j.update(supershort_json(*r.result));
      if (r.swapped) j["swapped"] = supershort_json(*r.swapped);
      if (r.components) {
        j["benchmark"] = {{"r2_d", number(r.components->r2_d)},
                          {"r2_y", number(r.components->r2_y)},
                          {"sd_y_resid", number(r.components->sd_y_resid)},
                          {"sd_d_resid", number(r.components->sd_d_resid)}};
      }
      if (r.nu) {
        j["nu_l"] = number(r.nu->nu_l);
        j["nu_u"] = number(r.nu->nu_u);
        settings.push_back({{"label", r.setting},
                            {"theta_s", number(r.result->theta_s)},
                            {"nu_l", number(r.nu->nu_l)},
                            {"nu_u", number(r.nu->nu_u)}});
      }
    }
    rows.push_back(std::move(j));
  }
  json out = {{"estimates", rows}, {"warnings", t.warnings}};
  // Ready to paste into a problem document when bias bounds were requested.
  if (!settings.empty()) out["settings"] = settings;
  return out;
}

std::string estimate_to_text(const EstimateTable& t) {
  std::ostringstream out;
  std::size_t w = 7;
  for (const auto& r : t.rows) w = std::max(w, r.setting.size());
  const bool swapped = std::any_of(t.rows.begin(), t.rows.end(), [](const auto& r) { return r.swapped.has_value(); });
  const bool nu = std::any_of(t.rows.begin(), t.rows.end(), [](const auto& r) { return r.nu.has_value(); });
  out << pad("Setting", w + 2) << pad("Rows", 8) << pad("theta_s", 11) << pad("theta_ss", 11) << pad("b_ss", 11);
  if (swapped) out << pad("b_ss swap", 11);
  if (nu) out << pad("nu_l", 11) << pad("nu_u", 11);
  out << "\n";
  for (const auto& r : t.rows) {
    out << pad(r.setting, w + 2) << pad(std::to_string(r.rows), 8);
    if (!r.error.empty()) {
      out << "error: " << r.error << "\n";
      continue;
    }
    out << pad(fixed3(r.result->theta_s), 11) << pad(fixed3(r.result->theta_ss), 11)
        << pad(fixed3(r.result->b_ss), 11);
    if (swapped) out << pad(r.swapped ? fixed3(r.swapped->b_ss) : "-", 11);
    if (nu) {
      out << pad(r.nu ? fixed3(r.nu->nu_l) : "-", 11) << pad(r.nu ? fixed3(r.nu->nu_u) : "-", 11);
    }
    out << "\n";
  }
  for (const auto& w8 : t.warnings) out << "warning: " << w8 << "\n";
  return out.str();
}

std::vector<PinTable> run_pins(const ProblemFile& problem, const std::vector<PinRequest>& pins) {
  const ConstraintGraph g = build(problem.estimates, problem.nus, problem.rho, problem.symmetric);
  const SolvedPolytope solved = close(g);
  if (!solved.feasible) throw InfeasibleError(kInfeasibleNotice);
  std::vector<PinTable> out;
  for (const auto& req : pins) {
    solved.graph.index_of(req.setting);
    out.push_back(PinTable{req, run_pin(solved.graph, req)});
  }
  return out;
}

json pins_to_json(const std::vector<PinTable>& tables) {
  json out = json::array();
  for (const auto& t : tables) {
    json j = pin_result_to_json(t.result);
    if (t.request.fraction) j["fraction"] = number(*t.request.fraction);
    out.push_back(std::move(j));
  }
  return {{"pins", out}};
}

std::string pins_to_text(const std::vector<PinTable>& tables) {
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += "\n";
    out += pin_table_text(tables[i]);
  }
  return out;
}

json audit_to_json(const ProblemFile& problem) {
  const SolvedPolytope solved =
      close(build(problem.estimates, problem.nus, problem.rho, problem.symmetric));
  json j = {{"feasible", solved.feasible},
            {"transitivity_violations", violations_to_json(transitivity_audit(problem.rho))},
            {"restricted_pairs", problem.rho.restricted_pairs()},
            {"warnings", problem.warnings}};
  for (const auto& w : solved.warnings) j["warnings"].push_back(w);
  if (!solved.feasible) j["message"] = kInfeasibleNotice;
  return j;
}

std::string audit_to_text(const ProblemFile& problem) {
  const json j = audit_to_json(problem);
  std::ostringstream out;
  out << "Joint identified set: " << (j["feasible"].get<bool>() ? "nonempty" : "EMPTY") << "\n";
  if (!j["feasible"].get<bool>()) out << kInfeasibleNotice << "\n";
  out << "Restricted pairs: " << j["restricted_pairs"].get<std::size_t>() << "\n";
  const auto violations = transitivity_audit(problem.rho);
  out << "Transitivity violations: " << violations.size() << "\n";
  for (const auto& v : violations) {
    out << "  (" << v.j << ", " << v.k << ", " << v.m << "): direct " << to_string(v.direct)
        << " vs product " << to_string(v.product) << "\n";
  }
  for (const auto& w : j["warnings"]) out << "warning: " << w.get<std::string>() << "\n";
  return out.str();
}

}  // namespace hetbounds::cli
