#include "hetbounds/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hetbounds/error.hpp"

namespace hetbounds {

std::size_t Column::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, values);
}

bool Column::missing(std::size_t row) const {
  return std::visit([row](const auto& v) { return !v.at(row).has_value(); },
                    values);
}

Dataset::Dataset(std::vector<Column> columns,
                 std::optional<std::vector<double>> weights)
    : columns_(std::move(columns)), weights_(std::move(weights)) {
  if (columns_.empty()) throw InvalidInput("dataset has no columns");
  rows_ = columns_.front().size();
  if (rows_ == 0) throw InvalidInput("dataset has no rows");
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].size() != rows_) {
      throw InvalidInput("column '" + columns_[i].name +
                         "' length differs from the first column");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (columns_[j].name == columns_[i].name) {
        throw InvalidInput("duplicate column '" + columns_[i].name + "'");
      }
    }
  }
  if (weights_) {
    if (weights_->size() != rows_) {
      throw InvalidInput("weights length differs from row count");
    }
    bool any_positive = false;
    for (double w : *weights_) {
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidInput("weights must be finite and nonnegative");
      }
      any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) throw InvalidInput("weights are all zero");
  }
}

bool Dataset::has_column(const std::string& name) const noexcept {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name == name; });
}

const Column& Dataset::column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw InvalidInput("unknown column '" + name + "'");
}

std::vector<std::string> Dataset::labels_of(const std::string& name) const {
  const Column& col = column(name);
  std::vector<std::string> out(rows_);
  if (const auto* num = std::get_if<NumericValues>(&col.values)) {
    char buf[40];
    for (std::size_t i = 0; i < rows_; ++i) {
      if ((*num)[i]) {
        std::snprintf(buf, sizeof buf, "%.12g", *(*num)[i]);
        out[i] = buf;
      }
    }
  } else {
    const auto& cat = std::get<CategoricalValues>(col.values);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (cat[i]) out[i] = *cat[i];
    }
  }
  return out;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    Column out{c.name, {}};
    std::visit(
        [&](const auto& v) {
          std::decay_t<decltype(v)> picked;
          picked.reserve(rows.size());
          for (std::size_t r : rows) picked.push_back(v.at(r));
          out.values = std::move(picked);
        },
        c.values);
    cols.push_back(std::move(out));
  }
  std::optional<std::vector<double>> w;
  if (weights_) {
    w.emplace();
    w->reserve(rows.size());
    for (std::size_t r : rows) w->push_back(weights_->at(r));
  }
  return Dataset(std::move(cols), std::move(w));
}

void Dataset::check_new_column(const std::string& name, std::size_t n) const {
  if (has_column(name)) throw InvalidInput("duplicate column '" + name + "'");
  if (!columns_.empty() && n != rows_) {
    throw InvalidInput("column '" + name + "' length differs from row count");
  }
  if (n == 0) throw InvalidInput("column '" + name + "' is empty");
}

void Dataset::add_numeric(std::string name, std::vector<double> values) {
  check_new_column(name, values.size());
  NumericValues v(values.begin(), values.end());
  rows_ = values.size();
  columns_.push_back(Column{std::move(name), std::move(v)});
}

void Dataset::add_categorical(std::string name, std::vector<std::string> values) {
  check_new_column(name, values.size());
  CategoricalValues v(values.begin(), values.end());
  rows_ = values.size();
  columns_.push_back(Column{std::move(name), std::move(v)});
}

}  // namespace hetbounds
