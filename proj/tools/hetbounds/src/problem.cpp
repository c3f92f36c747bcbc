#include "hetbounds_cli/problem.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>

#include "hetbounds/error.hpp"
#include "hetbounds_cli/commands.hpp"
#include "hetbounds_cli/csv.hpp"
#include "hetbounds_cli/rho_io.hpp"

namespace hetbounds::cli {
namespace {

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw InvalidInput(where + ": '" + key + "' must be a number");
  }
  return obj.at(key).get<double>();
}

std::string label_of(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InvalidInput("setting labels must be strings or integers");
}

std::vector<std::string> string_list(const json& v, const char* what) {
  if (!v.is_array()) throw InvalidInput(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw InvalidInput(std::string(what) + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

RhoMatrix reorder(const RhoMatrix& m, const std::vector<std::string>& labels) {
  if (m.size() != labels.size()) {
    throw InvalidInput("rho matrix has " + std::to_string(m.size()) + " settings but the problem has " +
                       std::to_string(labels.size()));
  }
  RhoMatrix out(labels);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    for (std::size_t k = j + 1; k < labels.size(); ++k) {
      out.set(j, k, m.at(labels[j], labels[k]));
    }
  }
  return out;
}

RhoMatrix supershort_from_data(const json& spec, const std::vector<std::string>& labels,
                               const std::filesystem::path& base, double epsilon,
                               EpsilonMode mode, std::vector<std::string>& warnings) {
  if (!spec.contains("data") || !spec.contains("by")) {
    throw InvalidInput("supershort rho from data needs 'data' and 'by'");
  }
  const Dataset data = read_dataset(resolve(base, spec.at("data").get<std::string>()));
  EstimateOptions opts;
  opts.spec = parse_regression_spec(spec);
  opts.by = spec.at("by").get<std::string>();
  if (spec.contains("min_rows")) opts.min_rows = spec.at("min_rows").get<std::size_t>();
  const EstimateTable table = run_estimate(data, opts);
  warnings.insert(warnings.end(), table.warnings.begin(), table.warnings.end());
  std::vector<double> b_ss;
  for (const auto& label : labels) {
    const EstimateRow* row = nullptr;
    for (const auto& r : table.rows) {
      if (r.setting == label) row = &r;
    }
    if (!row || !row->result) {
      throw InvalidInput("supershort estimation produced no b_ss for setting '" + label + "'" +
                         (row && !row->error.empty() ? ": " + row->error : ""));
    }
    b_ss.push_back(row->result->b_ss);
  }
  return supershort_matrix(labels, b_ss, epsilon, mode);
}

RhoMatrix resolve_rho(const json& rho, const std::vector<std::string>& labels,
                      const std::filesystem::path& base, double epsilon, EpsilonMode mode,
                      std::vector<std::string>& warnings) {
  if (rho.is_null()) return RhoMatrix(labels);
  if (rho.is_string()) return reorder(rho_from_csv_file(resolve(base, rho.get<std::string>())), labels);
  if (!rho.is_object() || rho.size() != 1) {
    throw InvalidInput("'rho' must be an object with exactly one of matrix, pairs, csv, "
                       "decay, adjacency, supershort");
  }
  const auto& [kind, body] = *rho.items().begin();
  if (kind == "matrix") return rho_from_grid(labels, body);
  if (kind == "pairs") {
    RhoMatrix m(labels);
    apply_rho_pairs(m, body);
    return m;
  }
  if (kind == "csv") return reorder(rho_from_csv_file(resolve(base, body.get<std::string>())), labels);
  if (kind == "decay") {
    const double b = require_number(body, "base", "rho.decay");
    std::vector<int> positions;
    if (!body.contains("positions")) {
      for (std::size_t i = 0; i < labels.size(); ++i) positions.push_back(static_cast<int>(i));
    } else if (body.at("positions").is_object()) {
      for (const auto& label : labels) {
        if (!body.at("positions").contains(label)) {
          throw InvalidInput("rho.decay.positions lacks setting '" + label + "'");
        }
        positions.push_back(body.at("positions").at(label).get<int>());
      }
    } else {
      positions = body.at("positions").get<std::vector<int>>();
    }
    return decay_matrix(labels, positions, b);
  }
  if (kind == "adjacency") {
    const double value = require_number(body, "value", "rho.adjacency");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& p : body.value("pairs", json::array())) {
      if (!p.is_array() || p.size() != 2) {
        throw InvalidInput("rho.adjacency.pairs entries must be [a, b]");
      }
      pairs.emplace_back(label_of(p[0]), label_of(p[1]));
    }
    return adjacency_matrix(labels, pairs, value, body.value("point", false));
  }
  if (kind == "supershort") {
    if (body.contains("b_ss")) {
      const json& b = body.at("b_ss");
      std::vector<double> values;
      for (const auto& label : labels) {
        if (!b.contains(label)) throw InvalidInput("rho.supershort.b_ss lacks setting '" + label + "'");
        values.push_back(b.at(label).get<double>());
      }
      return supershort_matrix(labels, values, epsilon, mode);
    }
    return supershort_from_data(body, labels, base, epsilon, mode, warnings);
  }
  throw InvalidInput("unknown rho form '" + kind + "'");
}

}  // namespace

std::vector<std::string> ProblemFile::labels() const {
  std::vector<std::string> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) out.push_back(e.setting);
  return out;
}

PinRequest parse_pin_request(const json& j) {
  if (!j.is_object() || !j.contains("setting")) throw InvalidInput("a pin needs a 'setting'");
  PinRequest p;
  p.setting = label_of(j.at("setting"));
  const bool has_value = j.contains("value") && !j.at("value").is_null();
  const bool has_fraction = j.contains("fraction") && !j.at("fraction").is_null();
  if (has_value == has_fraction) {
    throw InvalidInput("a pin needs exactly one of 'value' or 'fraction'");
  }
  if (has_value) p.value = require_number(j, "value", "pin");
  if (has_fraction) p.fraction = require_number(j, "fraction", "pin");
  return p;
}

RegressionSpec parse_regression_spec(const json& j) {
  RegressionSpec s;
  if (!j.contains("outcome") || !j.contains("treatment")) {
    throw InvalidInput("a regression spec needs 'outcome' and 'treatment'");
  }
  s.outcome = j.at("outcome").get<std::string>();
  s.treatment = j.at("treatment").get<std::string>();
  if (j.contains("controls_core")) s.controls_core = string_list(j.at("controls_core"), "controls_core");
  if (j.contains("controls_bench")) s.controls_bench = string_list(j.at("controls_bench"), "controls_bench");
  if (j.contains("weights") && !j.at("weights").is_null()) s.weight_column = j.at("weights").get<std::string>();
  return s;
}

ProblemFile parse_problem(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw InvalidInput("problem document must be a JSON object");
  if (!doc.contains("settings") || !doc.at("settings").is_array() || doc.at("settings").empty()) {
    throw InvalidInput("problem needs a nonempty 'settings' array");
  }
  ProblemFile p;
  std::set<std::string> seen;
  for (const auto& s : doc.at("settings")) {
    if (!s.is_object() || !s.contains("label")) throw InvalidInput("each setting needs a 'label'");
    const std::string label = label_of(s.at("label"));
    if (!seen.insert(label).second) throw InvalidInput("duplicate setting label '" + label + "'");
    const std::string where = "setting '" + label + "'";
    SettingEstimate e{label, require_number(s, "theta_s", where), std::nullopt};
    if (s.contains("n") && s.at("n").is_number_integer()) e.n = s.at("n").get<long long>();
    p.estimates.push_back(e);
    p.nus.push_back(BiasBound::checked(require_number(s, "nu_l", where), require_number(s, "nu_u", where)));
    individual_set(e, p.nus.back());
  }

  const json options = doc.value("options", json::object());
  p.symmetric = options.value("symmetric", false);
  p.epsilon = options.value("epsilon", 1e-6);
  const std::string mode = options.value("epsilon_mode", std::string("relative"));
  if (mode == "relative") p.epsilon_mode = EpsilonMode::Relative;
  else if (mode == "absolute") p.epsilon_mode = EpsilonMode::Absolute;
  else throw InvalidInput("options.epsilon_mode must be 'relative' or 'absolute'");
  if (!(p.epsilon > 0.0)) throw InvalidInput("options.epsilon must be positive");

  p.rho = resolve_rho(doc.contains("rho") ? doc.at("rho") : json(nullptr), p.labels(), base_dir,
                      p.epsilon, p.epsilon_mode, p.warnings);

  for (std::size_t j = 0; j < p.rho.size(); ++j) {
    for (std::size_t k = j + 1; k < p.rho.size(); ++k) {
      const RhoBound& b = p.rho.at(j, k);
      if (b.is_restricted() && !b.brackets_one()) {
        p.warnings.push_back("rho interval for (" + p.rho.settings()[j] + ", " + p.rho.settings()[k] +
                             ") " + to_string(Interval{b.lower(), b.upper()}) +
                             " does not contain 1");
      }
    }
  }

  if (doc.contains("pins")) {
    for (const auto& pin : doc.at("pins")) {
      PinRequest r = parse_pin_request(pin);
      if (!seen.count(r.setting)) throw InvalidInput("pin refers to unknown setting '" + r.setting + "'");
      p.pins.push_back(std::move(r));
    }
  }
  return p;
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open problem file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("problem file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_problem(doc, path.parent_path());
}

json problem_to_json(const ProblemFile& p) {
  json settings = json::array();
  for (std::size_t i = 0; i < p.estimates.size(); ++i) {
    json s = {{"label", p.estimates[i].setting},
              {"theta_s", number(p.estimates[i].theta_s)},
              {"nu_l", number(p.nus[i].nu_l)},
              {"nu_u", number(p.nus[i].nu_u)}};
    if (p.estimates[i].n) s["n"] = *p.estimates[i].n;
    settings.push_back(std::move(s));
  }
  json doc = {{"settings", settings},
              {"rho", {{"pairs", rho_to_json(p.rho).at("pairs")}}},
              {"options",
               {{"symmetric", p.symmetric},
                {"epsilon", number(p.epsilon)},
                {"epsilon_mode", p.epsilon_mode == EpsilonMode::Relative ? "relative" : "absolute"}}}};
  if (!p.pins.empty()) {
    json pins = json::array();
    for (const auto& pin : p.pins) {
      json j = {{"setting", pin.setting}};
      if (pin.value) j["value"] = number(*pin.value);
      if (pin.fraction) j["fraction"] = number(*pin.fraction);
      pins.push_back(std::move(j));
    }
    doc["pins"] = std::move(pins);
  }
  return doc;
}

std::string content_hash(const ProblemFile& p) {
  const std::string text = problem_to_json(p).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace hetbounds::cli
