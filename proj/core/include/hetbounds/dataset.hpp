#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hetbounds {

using NumericValues = std::vector<std::optional<double>>;
using CategoricalValues = std::vector<std::optional<std::string>>;

/// A named column. Missing cells are nullopt.
struct Column {
  std::string name;
  std::variant<NumericValues, CategoricalValues> values;

  bool is_numeric() const noexcept {
    return std::holds_alternative<NumericValues>(values);
  }
  std::size_t size() const noexcept;
  bool missing(std::size_t row) const;
};

/// Column-oriented table of observations with optional row weights.
///
/// All columns share one length. Weights, when present, are finite,
/// nonnegative and not all zero.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Column> columns,
          std::optional<std::vector<double>> weights = std::nullopt);

  std::size_t rows() const noexcept { return rows_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const std::optional<std::vector<double>>& weights() const noexcept {
    return weights_;
  }

  bool has_column(const std::string& name) const noexcept;
  const Column& column(const std::string& name) const;

  /// Cell values rendered as strings, used for grouping by setting.
  /// Numeric cells use up to 12 significant digits; missing cells are empty.
  std::vector<std::string> labels_of(const std::string& name) const;

  /// New dataset holding only the given rows, in the given order.
  Dataset select_rows(const std::vector<std::size_t>& rows) const;

  /// Appends a numeric column. Throws InvalidInput on length mismatch or
  /// duplicate name.
  void add_numeric(std::string name, std::vector<double> values);
  void add_categorical(std::string name, std::vector<std::string> values);

 private:
  void check_new_column(const std::string& name, std::size_t n) const;

  std::vector<Column> columns_;
  std::optional<std::vector<double>> weights_;
  std::size_t rows_ = 0;
};

}  // namespace hetbounds
