#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "hetbounds/dataset.hpp"

namespace hetbounds::cli {

/// Splits CSV text into rows of fields. Handles double-quoted fields with
/// embedded commas, quotes ("") and newlines. Blank lines are skipped.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

/// Loads a header-first CSV as a Dataset. A column is numeric when every
/// non-missing cell parses as a number; otherwise categorical. Empty cells,
/// "NA" and "." are missing.
Dataset read_dataset(const std::filesystem::path& path);
Dataset read_dataset(std::istream& in);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

}  // namespace hetbounds::cli
