#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "hetbounds/rho_matrix.hpp"
#include "hetbounds_cli/json_format.hpp"

namespace hetbounds::cli {

/// Square split-triangle CSV: the first row and first column carry the
/// setting labels; for row r < column c, cell (r, c) is rho^{rc}_u and cell
/// (c, r) is rho^{rc}_l. The diagonal and unrestricted pairs are blank.
std::string rho_to_csv(const RhoMatrix& m);
RhoMatrix rho_from_csv(std::istream& in);
RhoMatrix rho_from_csv_file(const std::filesystem::path& path);

/// Same layout as a JSON grid with null for blank cells.
RhoMatrix rho_from_grid(const std::vector<std::string>& settings, const json& grid);

/// {"settings": [...], "pairs": [{"j", "k", "rho_l", "rho_u"}...]}, listing
/// each restricted unordered pair once with j before k in setting order.
json rho_to_json(const RhoMatrix& m);
RhoMatrix rho_from_json(const json& j);

/// Applies pair objects {"j","k","rho_l","rho_u"} or {"j","k","unrestricted":true}.
void apply_rho_pairs(RhoMatrix& m, const json& pairs);

}  // namespace hetbounds::cli
