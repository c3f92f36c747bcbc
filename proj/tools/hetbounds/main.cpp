// hetbounds: bounds on setting-specific causal effects under proportional
// omitted-variable-bias restrictions.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hetbounds/error.hpp"
#include "hetbounds_cli/commands.hpp"
#include "hetbounds_cli/csv.hpp"
#include "hetbounds_cli/http.hpp"
#include "hetbounds_cli/problem.hpp"
#include "hetbounds_cli/report.hpp"
#include "hetbounds_cli/rho_io.hpp"

namespace {

using namespace hetbounds;
using namespace hetbounds::cli;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + output + "'");
  out << text;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

std::vector<double> parse_doubles(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : split_list(items)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw InvalidInput("not a number: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

void write_rho(const RhoMatrix& m, const std::string& out_prefix, const std::string& format) {
  if (!out_prefix.empty()) {
    emit(rho_to_csv(m), out_prefix + ".csv");
    emit(dump_canonical(rho_to_json(m)), out_prefix + ".json");
    return;
  }
  emit(format == "json" ? dump_canonical(rho_to_json(m)) : rho_to_csv(m), "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetbounds: joint partial identification bounds across settings"};
  app.set_version_flag("--version", HETBOUNDS_VERSION);
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "Short and supershort regressions per setting");
  std::string data_path, by, weights, est_format = "text", est_output;
  RegressionSpec spec;
  std::vector<std::string> core_raw, bench_raw;
  std::size_t min_rows = 10;
  double strength = -1.0;
  bool sensitivity = false;
  est->add_option("--data", data_path, "CSV dataset")->required()->check(CLI::ExistingFile);
  est->add_option("--outcome", spec.outcome, "Outcome column")->required();
  est->add_option("--treatment", spec.treatment, "Treatment column")->required();
  est->add_option("--controls-core", core_raw, "Always-included controls (comma separated)");
  est->add_option("--controls-bench", bench_raw, "Benchmark controls dropped by the supershort fit")
      ->required();
  est->add_option("--by", by, "Setting column")->required();
  est->add_option("--weights", weights, "Weight column");
  est->add_option("--min-rows", min_rows, "Skip settings with fewer complete rows")->capture_default_str();
  est->add_option("--strength", strength,
                  "Also derive nu = [-b, b] from the benchmark partition at this strength multiplier");
  est->add_flag("--partition-sensitivity", sensitivity, "Also report b_ss with partitions swapped");
  est->add_option("--format", est_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  est->add_option("-o,--output", est_output, "Write to this file instead of stdout");

  // rho
  auto* rho = app.add_subcommand("rho", "Generate a rho bounds matrix");
  rho->require_subcommand(1);
  std::string rho_out, rho_format = "csv";
  std::vector<std::string> rho_settings;
  for (auto* sub : {rho}) {
    sub->add_option("--out", rho_out, "Write PREFIX.csv and PREFIX.json");
    sub->add_option("--format", rho_format, "stdout format without --out")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
  auto* ss = rho->add_subcommand("supershort", "Bounds from ratios of observed bias shifts");
  std::vector<std::string> bss_raw;
  std::string estimates_path;
  double epsilon = 1e-6;
  bool absolute = false;
  ss->add_option("--settings", rho_settings, "Setting labels (comma separated)");
  ss->add_option("--bss", bss_raw, "b_ss per setting, in --settings order");
  ss->add_option("--estimates", estimates_path, "JSON output of 'estimate'")->check(CLI::ExistingFile);
  ss->add_option("--epsilon", epsilon, "Near-zero guard")->capture_default_str();
  ss->add_flag("--absolute", absolute, "Epsilon is absolute instead of relative to max |b_ss|");
  ss->fallthrough();

  auto* decay = rho->add_subcommand("decay", "[base^d, base^-d] by distance");
  double base = 0.95;
  std::vector<std::string> positions_raw;
  decay->add_option("--settings", rho_settings, "Setting labels (comma separated)")->required();
  decay->add_option("--base", base, "Decay base in (0, 1)")->capture_default_str();
  decay->add_option("--positions", positions_raw, "Integer position per setting (default 0..K-1)");
  decay->fallthrough();

  auto* adj = rho->add_subcommand("adjacency", "[1/v, v] for adjacent pairs only");
  double adj_value = 1.1;
  std::vector<std::string> adj_pairs;
  bool point = false;
  adj->add_option("--settings", rho_settings, "Setting labels (comma separated)")->required();
  adj->add_option("--value", adj_value, "rho value >= 1")->capture_default_str();
  adj->add_option("--pair", adj_pairs, "Adjacent pair as a:b (repeatable)");
  adj->add_flag("--point", point, "Exact ratio rho = value instead of [1/value, value]");
  adj->fallthrough();

  // solve
  auto* solve = app.add_subcommand("solve", "Solve the joint polytope and report marginals");
  std::string problem_path, solve_format = "text", solve_output;
  bool symmetric = false;
  solve->add_option("--problem", problem_path, "Problem JSON")->required()->check(CLI::ExistingFile);
  solve->add_flag("--symmetric", symmetric, "Use rho_l = 1/rho_u for every pair");
  solve->add_option("--format", solve_format)->check(CLI::IsMember({"text", "json", "svg"}))->capture_default_str();
  solve->add_option("-o,--output", solve_output, "Write to this file instead of stdout");

  // pin
  auto* pin_cmd = app.add_subcommand("pin", "Conditional identified sets given pinned values");
  std::string pin_problem, pin_format = "text", pin_output, current_setting;
  std::vector<PinRequest> pins;
  bool pin_symmetric = false;
  pin_cmd->add_option("--problem", pin_problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  pin_cmd->add_option_function<std::string>(
            "--setting", [&](const std::string& s) { current_setting = s; }, "Setting to pin")
      ->trigger_on_parse()
      ->required();
  pin_cmd->add_option_function<double>(
            "--value",
            [&](double v) { pins.push_back(PinRequest{current_setting, v, std::nullopt}); },
            "Pin at this value (repeatable)")
      ->trigger_on_parse();
  pin_cmd->add_option_function<double>(
            "--fraction",
            [&](double f) { pins.push_back(PinRequest{current_setting, std::nullopt, f}); },
            "Pin at this fraction of the marginal (repeatable)")
      ->trigger_on_parse();
  pin_cmd->add_flag("--symmetric", pin_symmetric, "Use rho_l = 1/rho_u for every pair");
  pin_cmd->add_option("--format", pin_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  pin_cmd->add_option("-o,--output", pin_output, "Write to this file instead of stdout");

  // audit
  auto* audit = app.add_subcommand("audit", "Transitivity and feasibility checks");
  std::string audit_problem, audit_format = "text";
  audit->add_option("--problem", audit_problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  audit->add_option("--format", audit_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Local JSON API for the explorer UI");
  std::string serve_problem, host = "127.0.0.1", ui_dir;
  int port = 8080;
  serve_cmd->add_option("--problem", serve_problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--ui-dir", ui_dir, "Static UI assets to serve at /")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version are reported as successful "errors".
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (est->parsed()) {
      spec.controls_core = split_list(core_raw);
      spec.controls_bench = split_list(bench_raw);
      if (!weights.empty()) spec.weight_column = weights;
      EstimateOptions opts{spec, by, min_rows, std::nullopt, sensitivity};
      if (strength >= 0.0) opts.strength = strength;
      const EstimateTable table = run_estimate(read_dataset(data_path), opts);
      emit(est_format == "json" ? dump_canonical(estimate_to_json(table)) : estimate_to_text(table),
           est_output);
      return 0;
    }
    if (rho->parsed()) {
      const auto labels = split_list(rho_settings);
      if (ss->parsed()) {
        std::vector<std::string> names = labels;
        std::vector<double> b_ss;
        if (!estimates_path.empty()) {
          std::ifstream in(estimates_path);
          const json doc = json::parse(in);
          names.clear();
          for (const auto& row : doc.at("estimates")) {
            if (row.contains("error")) continue;
            names.push_back(row.at("setting").get<std::string>());
            b_ss.push_back(row.at("b_ss").get<double>());
          }
        } else {
          b_ss = parse_doubles(bss_raw);
        }
        write_rho(supershort_matrix(names, b_ss, epsilon,
                                    absolute ? EpsilonMode::Absolute : EpsilonMode::Relative),
                  rho_out, rho_format);
      } else if (decay->parsed()) {
        std::vector<int> positions;
        if (positions_raw.empty()) {
          for (std::size_t i = 0; i < labels.size(); ++i) positions.push_back(static_cast<int>(i));
        } else {
          for (double p : parse_doubles(positions_raw)) positions.push_back(static_cast<int>(p));
        }
        write_rho(decay_matrix(labels, positions, base), rho_out, rho_format);
      } else {
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& p : adj_pairs) {
          const auto colon = p.find(':');
          if (colon == std::string::npos) throw InvalidInput("--pair expects a:b, got '" + p + "'");
          pairs.emplace_back(p.substr(0, colon), p.substr(colon + 1));
        }
        write_rho(adjacency_matrix(labels, pairs, adj_value, point), rho_out, rho_format);
      }
      return 0;
    }
    if (solve->parsed()) {
      ProblemFile problem = load_problem(problem_path);
      if (symmetric) problem.symmetric = true;
      const ReportBundle report = make_report(problem);
      std::string text;
      if (solve_format == "json") text = dump_canonical(report_to_json(report));
      else if (solve_format == "svg") text = report_to_svg(report);
      else text = report_to_text(report);
      emit(text, solve_output);
      if (!report.feasible) {
        std::cerr << "hetbounds: " << kInfeasibleNotice << "\n";
        return kExitInfeasible;
      }
      return 0;
    }
    if (pin_cmd->parsed()) {
      ProblemFile problem = load_problem(pin_problem);
      if (pin_symmetric) problem.symmetric = true;
      if (pins.empty()) throw InvalidInput("give at least one --value or --fraction after --setting");
      const auto tables = run_pins(problem, pins);
      emit(pin_format == "json" ? dump_canonical(pins_to_json(tables)) : pins_to_text(tables), pin_output);
      return 0;
    }
    if (audit->parsed()) {
      const ProblemFile problem = load_problem(audit_problem);
      const json j = audit_to_json(problem);
      emit(audit_format == "json" ? dump_canonical(j) : audit_to_text(problem), "");
      return j.at("feasible").get<bool>() ? 0 : kExitInfeasible;
    }
    if (serve_cmd->parsed()) {
      ModelService service(load_problem(serve_problem));
      std::optional<std::filesystem::path> ui;
      if (!ui_dir.empty()) ui = ui_dir;
      std::cerr << "hetbounds: serving snapshot " << service.base_snapshot() << " on http://" << host
                << ":" << port << "\n";
      serve(service, host, port, ui);
      return 0;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "hetbounds: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "hetbounds: error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
