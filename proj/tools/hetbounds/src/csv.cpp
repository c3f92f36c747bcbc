#include "hetbounds_cli/csv.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>

#include "hetbounds/error.hpp"

namespace hetbounds::cli {
namespace {

bool is_missing(const std::string& s) { return s.empty() || s == "NA" || s == "."; }

std::optional<double> parse_number(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') return std::nullopt;
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  auto end_field = [&] {
    row.push_back(field_was_quoted ? field : trim(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  char ch;
  while (in.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        quoted = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(ch);
    }
  }
  if (quoted) throw InvalidInput("CSV ends inside a quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

Dataset read_dataset(std::istream& in) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw InvalidInput("CSV is empty");
  const auto& header = rows.front();
  const std::size_t ncol = header.size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != ncol) {
      throw InvalidInput("CSV row " + std::to_string(r + 1) + " has " +
                         std::to_string(rows[r].size()) + " fields, expected " +
                         std::to_string(ncol));
    }
  }
  std::vector<Column> cols;
  cols.reserve(ncol);
  for (std::size_t c = 0; c < ncol; ++c) {
    bool numeric = true;
    for (std::size_t r = 1; r < rows.size() && numeric; ++r) {
      const auto& cell = rows[r][c];
      numeric = is_missing(cell) || parse_number(cell).has_value();
    }
    Column col{header[c], {}};
    if (numeric) {
      NumericValues v;
      v.reserve(rows.size() - 1);
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cell = rows[r][c];
        v.push_back(is_missing(cell) ? std::nullopt : parse_number(cell));
      }
      col.values = std::move(v);
    } else {
      CategoricalValues v;
      v.reserve(rows.size() - 1);
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cell = rows[r][c];
        v.push_back(is_missing(cell) ? std::nullopt : std::optional<std::string>(cell));
      }
      col.values = std::move(v);
    }
    cols.push_back(std::move(col));
  }
  return Dataset(std::move(cols));
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open data file '" + path.string() + "'");
  return read_dataset(in);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

}  // namespace hetbounds::cli
