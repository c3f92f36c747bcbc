#include "hetbounds_cli/rho_io.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "hetbounds/error.hpp"
#include "hetbounds_cli/csv.hpp"

namespace hetbounds::cli {
namespace {

std::string format_cell(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kJsonSignificantDigits, x);
  return buf;
}

std::optional<double> parse_cell(const std::string& cell, std::size_t r, std::size_t c) {
  if (cell.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') {
    throw InvalidInput("rho matrix cell (" + std::to_string(r + 1) + ", " +
                       std::to_string(c + 1) + ") is not a number: '" + cell + "'");
  }
  return v;
}

// Fills the matrix from split-triangle cells; `cell(r, c)` returns the
// value at row r, column c (0-based over settings).
template <typename CellFn>
RhoMatrix from_split_triangle(const std::vector<std::string>& settings, CellFn cell) {
  RhoMatrix m(settings);
  for (std::size_t r = 0; r < settings.size(); ++r) {
    for (std::size_t c = r + 1; c < settings.size(); ++c) {
      const std::optional<double> upper = cell(r, c);
      const std::optional<double> lower = cell(c, r);
      if (!upper && !lower) continue;
      if (!upper || !lower) {
        throw InvalidInput("rho pair (" + settings[r] + ", " + settings[c] +
                           ") has only one of its two bounds");
      }
      m.set(r, c, RhoBound::restricted(*lower, *upper));
    }
  }
  return m;
}

}  // namespace

std::string rho_to_csv(const RhoMatrix& m) {
  std::ostringstream out;
  out << "setting";
  for (const auto& s : m.settings()) out << ',' << csv_escape(s);
  out << '\n';
  for (std::size_t r = 0; r < m.size(); ++r) {
    out << csv_escape(m.settings()[r]);
    for (std::size_t c = 0; c < m.size(); ++c) {
      out << ',';
      if (r == c) continue;
      const RhoBound& b = r < c ? m.at(r, c) : m.at(c, r);
      if (!b.is_restricted()) continue;
      out << format_cell(r < c ? b.upper() : b.lower());
    }
    out << '\n';
  }
  return out.str();
}

RhoMatrix rho_from_csv(std::istream& in) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw InvalidInput("rho matrix CSV is empty");
  const auto& header = rows.front();
  if (header.size() < 2) throw InvalidInput("rho matrix CSV needs at least one setting");
  std::vector<std::string> settings(header.begin() + 1, header.end());
  const std::size_t k = settings.size();
  if (rows.size() != k + 1) {
    throw InvalidInput("rho matrix CSV is not square: " + std::to_string(k) +
                       " columns but " + std::to_string(rows.size() - 1) + " rows");
  }
  for (std::size_t r = 0; r < k; ++r) {
    const auto& row = rows[r + 1];
    if (row.size() != k + 1) {
      throw InvalidInput("rho matrix CSV row " + std::to_string(r + 2) + " has the wrong width");
    }
    if (row[0] != settings[r]) {
      throw InvalidInput("rho matrix CSV row label '" + row[0] + "' does not match column '" +
                         settings[r] + "'");
    }
  }
  return from_split_triangle(settings, [&](std::size_t r, std::size_t c) {
    return parse_cell(rows[r + 1][c + 1], r, c);
  });
}

RhoMatrix rho_from_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open rho matrix file '" + path.string() + "'");
  return rho_from_csv(in);
}

RhoMatrix rho_from_grid(const std::vector<std::string>& settings, const json& grid) {
  const std::size_t k = settings.size();
  if (!grid.is_array() || grid.size() != k) {
    throw InvalidInput("rho matrix must be a " + std::to_string(k) + "x" + std::to_string(k) +
                       " array");
  }
  for (const auto& row : grid) {
    if (!row.is_array() || row.size() != k) {
      throw InvalidInput("rho matrix rows must have " + std::to_string(k) + " entries");
    }
  }
  return from_split_triangle(settings, [&](std::size_t r, std::size_t c) -> std::optional<double> {
    const json& v = grid[r][c];
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) throw InvalidInput("rho matrix entries must be numbers or null");
    return v.get<double>();
  });
}

json rho_to_json(const RhoMatrix& m) {
  json pairs = json::array();
  for (std::size_t j = 0; j < m.size(); ++j) {
    for (std::size_t k = j + 1; k < m.size(); ++k) {
      const RhoBound& b = m.at(j, k);
      if (!b.is_restricted()) continue;
      pairs.push_back({{"j", m.settings()[j]},
                       {"k", m.settings()[k]},
                       {"rho_l", number(b.lower())},
                       {"rho_u", number(b.upper())}});
    }
  }
  return {{"settings", m.settings()}, {"pairs", pairs}};
}

void apply_rho_pairs(RhoMatrix& m, const json& pairs) {
  if (!pairs.is_array()) throw InvalidInput("rho pairs must be an array");
  for (const auto& p : pairs) {
    if (!p.is_object() || !p.contains("j") || !p.contains("k")) {
      throw InvalidInput("each rho pair needs string fields 'j' and 'k'");
    }
    const auto j = p.at("j").get<std::string>();
    const auto k = p.at("k").get<std::string>();
    if (p.value("unrestricted", false)) {
      m.set(j, k, RhoBound::unrestricted());
      continue;
    }
    if (!p.contains("rho_l") || !p.contains("rho_u") || !p["rho_l"].is_number() ||
        !p["rho_u"].is_number()) {
      throw InvalidInput("rho pair (" + j + ", " + k +
                         ") needs numeric rho_l and rho_u, or unrestricted: true");
    }
    m.set(j, k, RhoBound::restricted(p["rho_l"].get<double>(), p["rho_u"].get<double>()));
  }
}

RhoMatrix rho_from_json(const json& j) {
  if (!j.is_object() || !j.contains("settings")) {
    throw InvalidInput("rho JSON needs a 'settings' array");
  }
  RhoMatrix m(j.at("settings").get<std::vector<std::string>>());
  if (j.contains("pairs")) apply_rho_pairs(m, j.at("pairs"));
  return m;
}

}  // namespace hetbounds::cli
