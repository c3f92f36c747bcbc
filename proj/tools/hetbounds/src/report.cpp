#include "hetbounds_cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hetbounds/error.hpp"

namespace hetbounds::cli {
namespace {

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string pin_label(const PinRequest& r, double pinned_value) {
  std::string s = r.setting + " = " + fixed3(pinned_value);
  if (r.fraction) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " (fraction %.3g)", *r.fraction);
    s += buf;
  }
  return s;
}

}  // namespace

PinResult run_pin(const ConstraintGraph& graph, const PinRequest& request) {
  if (request.fraction) return pin_at_fraction(graph, request.setting, *request.fraction);
  if (request.value) return pin(graph, request.setting, *request.value);
  throw InvalidInput("a pin needs a value or a fraction");
}

ReportBundle make_report(const ProblemFile& problem, const SolvedPolytope& solved,
                         const std::vector<PinRequest>& pins) {
  ReportBundle r;
  r.feasible = solved.feasible;
  r.symmetric = problem.symmetric;
  for (std::size_t i = 0; i < problem.estimates.size(); ++i) {
    UnivariateRow row;
    row.setting = problem.estimates[i].setting;
    row.estimate = problem.estimates[i].theta_s;
    row.original = solved.graph.original()[i];
    if (solved.feasible) {
      row.projected = solved.marginals[i];
      row.lower_raised = solved.sharpening[i].lower_raised;
      row.upper_lowered = solved.sharpening[i].upper_lowered;
    }
    r.univariate_table.push_back(std::move(row));
  }
  if (solved.feasible) {
    for (const auto& req : pins) {
      r.pin_tables.push_back(PinTable{req, run_pin(solved.graph, req)});
    }
  }
  r.violations = transitivity_audit(problem.rho);
  r.warnings = problem.warnings;
  r.warnings.insert(r.warnings.end(), solved.warnings.begin(), solved.warnings.end());
  return r;
}

ReportBundle make_report(const ProblemFile& problem) {
  const ConstraintGraph g = build(problem.estimates, problem.nus, problem.rho, problem.symmetric);
  return make_report(problem, close(g), problem.pins);
}

json pin_result_to_json(const PinResult& p) {
  json j = {{"pinned_setting", p.pinned_setting},
            {"pinned_value", number(p.pinned_value)},
            {"feasible", p.feasible}};
  if (p.feasible) {
    json cond = json::object();
    for (const auto& c : p.conditional) cond[c.setting] = interval_json(c.interval);
    j["conditional"] = std::move(cond);
  }
  return j;
}

json violations_to_json(const std::vector<TransitivityViolation>& v) {
  json out = json::array();
  for (const auto& x : v) {
    out.push_back({{"triple", {x.j, x.k, x.m}},
                   {"direct", interval_json(x.direct)},
                   {"product", interval_json(x.product)}});
  }
  return out;
}

json solved_to_json(const SolvedPolytope& s) {
  json settings = json::array();
  json original = json::object();
  for (std::size_t i = 0; i < s.graph.settings_count(); ++i) {
    const auto& label = s.graph.estimates()[i].setting;
    settings.push_back(label);
    original[label] = interval_json(s.graph.original()[i]);
  }
  json j = {{"feasible", s.feasible},
            {"settings", settings},
            {"original", original},
            {"warnings", s.warnings}};
  if (s.feasible) {
    json marginals = json::object();
    json sharpening = json::object();
    for (std::size_t i = 0; i < s.graph.settings_count(); ++i) {
      const auto& rec = s.sharpening[i];
      marginals[rec.setting] = interval_json(s.marginals[i]);
      sharpening[rec.setting] = {{"lower_raised", rec.lower_raised},
                                 {"upper_lowered", rec.upper_lowered},
                                 {"lower_raise", number(rec.lower_raise)},
                                 {"upper_lower", number(rec.upper_lower)},
                                 {"lower_partners", rec.lower_partners},
                                 {"upper_partners", rec.upper_partners}};
    }
    j["marginals"] = std::move(marginals);
    j["sharpening"] = std::move(sharpening);
  } else {
    j["message"] = kInfeasibleNotice;
  }
  return j;
}

json report_to_json(const ReportBundle& r) {
  json table = json::array();
  json plot = json::array();
  for (std::size_t i = 0; i < r.univariate_table.size(); ++i) {
    const auto& row = r.univariate_table[i];
    json t = {{"setting", row.setting},
              {"estimate", number(row.estimate)},
              {"original_lower", number(row.original.lower)},
              {"original_upper", number(row.original.upper)},
              {"new_lower", row.projected ? number(row.projected->lower) : json(nullptr)},
              {"new_upper", row.projected ? number(row.projected->upper) : json(nullptr)},
              {"lower_raised", row.lower_raised},
              {"upper_lowered", row.upper_lowered}};
    table.push_back(std::move(t));

    json conditional = json::array();
    for (const auto& pt : r.pin_tables) {
      if (!pt.result.feasible) {
        conditional.push_back(nullptr);
      } else if (pt.result.pinned_setting == row.setting) {
        conditional.push_back(interval_json(Interval{pt.result.pinned_value, pt.result.pinned_value}));
      } else {
        const auto c = pt.result.conditional_for(row.setting);
        conditional.push_back(c ? interval_json(*c) : json(nullptr));
      }
    }
    plot.push_back({{"setting", row.setting},
                    {"original", interval_json(row.original)},
                    {"projected", row.projected ? interval_json(*row.projected) : json(nullptr)},
                    {"conditional", conditional}});
  }
  json pins = json::array();
  for (const auto& pt : r.pin_tables) {
    json p = pin_result_to_json(pt.result);
    if (pt.request.fraction) p["fraction"] = number(*pt.request.fraction);
    pins.push_back(std::move(p));
  }
  json j = {{"feasible", r.feasible},
            {"symmetric", r.symmetric},
            {"univariate_table", table},
            {"pin_tables", pins},
            {"audits",
             {{"feasible", r.feasible},
              {"transitivity_violations", violations_to_json(r.violations)},
              {"warnings", r.warnings}}},
            {"plot_data", plot}};
  if (!r.feasible) j["message"] = kInfeasibleNotice;
  return j;
}

std::string pin_table_text(const PinTable& t) {
  std::ostringstream out;
  out << "Pin " << pin_label(t.request, t.result.pinned_value) << "\n";
  if (!t.result.feasible) {
    out << "  infeasible: no point of the joint identified set has " << t.request.setting
        << " at this value\n";
    return out.str();
  }
  std::size_t w = 7;
  for (const auto& c : t.result.conditional) w = std::max(w, c.setting.size());
  out << "  " << pad("Setting", w + 2) << pad("Lower", 10) << "Upper\n";
  for (const auto& c : t.result.conditional) {
    out << "  " << pad(c.setting, w + 2) << pad(fixed3(c.interval.lower), 10)
        << fixed3(c.interval.upper) << "\n";
  }
  return out.str();
}

std::string report_to_text(const ReportBundle& r) {
  std::ostringstream out;
  if (!r.feasible) out << "INFEASIBLE: " << kInfeasibleNotice << "\n\n";
  std::size_t w = 7;
  for (const auto& row : r.univariate_table) w = std::max(w, row.setting.size());
  out << pad("Setting", w + 2) << pad("Estimate", 10) << pad("New Lower", 11) << pad("New Upper", 11)
      << pad("Orig Lower", 12) << pad("Orig Upper", 12) << "Sharpened\n";
  for (const auto& row : r.univariate_table) {
    const std::string nl = row.projected ? fixed3(row.projected->lower) : "-";
    const std::string nu = row.projected ? fixed3(row.projected->upper) : "-";
    std::string sharp;
    if (row.lower_raised && row.upper_lowered) sharp = "both";
    else if (row.lower_raised) sharp = "lower";
    else if (row.upper_lowered) sharp = "upper";
    out << pad(row.setting, w + 2) << pad(fixed3(row.estimate), 10) << pad(nl, 11) << pad(nu, 11)
        << pad(fixed3(row.original.lower), 12) << pad(fixed3(row.original.upper), 12) << sharp
        << "\n";
  }
  for (const auto& pt : r.pin_tables) out << "\n" << pin_table_text(pt);
  out << "\nTransitivity violations: " << r.violations.size() << "\n";
  for (const auto& v : r.violations) {
    out << "  (" << v.j << ", " << v.k << ", " << v.m << "): direct " << to_string(v.direct)
        << " vs product " << to_string(v.product) << "\n";
  }
  for (const auto& w8 : r.warnings) out << "warning: " << w8 << "\n";
  return out.str();
}

std::string report_to_svg(const ReportBundle& r) {
  constexpr double kWidth = 720.0, kLeft = 120.0, kRight = 30.0, kRow = 30.0, kTop = 30.0;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  auto extend = [&](const Interval& iv) {
    if (first) {
      lo = iv.lower;
      hi = iv.upper;
      first = false;
    }
    lo = std::min(lo, iv.lower);
    hi = std::max(hi, iv.upper);
  };
  for (const auto& row : r.univariate_table) extend(row.original);
  if (hi - lo <= 0.0) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double span = hi - lo;
  auto x = [&](double v) { return kLeft + (v - lo) / span * (kWidth - kLeft - kRight); };
  const double height = kTop + kRow * static_cast<double>(r.univariate_table.size()) + 30.0;

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                kWidth, height);
  out << buf;
  if (!r.feasible) {
    out << "<text x=\"10\" y=\"18\" fill=\"#b00020\" font-weight=\"bold\">Infeasible: bounds must be "
           "relaxed</text>\n";
  }
  const PinTable* pin = r.pin_tables.empty() ? nullptr : &r.pin_tables.front();
  for (std::size_t i = 0; i < r.univariate_table.size(); ++i) {
    const auto& row = r.univariate_table[i];
    const double y = kTop + kRow * static_cast<double>(i);
    std::snprintf(buf, sizeof buf, "<text x=\"10\" y=\"%.1f\">", y + 14.0);
    out << buf << xml_escape(row.setting) << "</text>\n";
    auto bar = [&](const Interval& iv, double dy, double h, const char* fill) {
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.1f\" fill=\"%s\"/>\n",
                    x(iv.lower), y + dy, std::max(1.0, x(iv.upper) - x(iv.lower)), h, fill);
      out << buf;
    };
    bar(row.original, 2.0, 18.0, "#d0d7e2");
    if (row.projected) bar(*row.projected, 6.0, 10.0, "#34495e");
    if (pin && pin->result.feasible) {
      if (const auto c = pin->result.conditional_for(row.setting)) bar(*c, 9.0, 4.0, "#e67e22");
    }
  }
  const double axis_y = kTop + kRow * static_cast<double>(r.univariate_table.size()) + 4.0;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.1f\">%s</text>\n<text x=\"%.2f\" y=\"%.1f\" "
                "text-anchor=\"end\">%s</text>\n",
                kLeft, axis_y + 12.0, fixed3(lo).c_str(), kWidth - kRight, axis_y + 12.0,
                fixed3(hi).c_str());
  out << buf << "</svg>\n";
  return out.str();
}

}  // namespace hetbounds::cli
