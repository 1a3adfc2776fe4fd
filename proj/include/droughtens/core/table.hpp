#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "droughtens/core/calendar.hpp"
#include "droughtens/core/errors.hpp"
#include "droughtens/core/text.hpp"

namespace droughtens {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

struct RowKey {
  std::string unit;
  YearMonth month;

  friend auto operator<=>(const RowKey&, const RowKey&) = default;
  std::string str() const { return unit + "/" + month.str(); }
};

// Per-unit monthly panel. Rows are sorted by (unit, month), months within a
// unit are contiguous, and missing cells hold NaN. Instances are immutable
// once built; the with_* members return modified copies.
class TimeSeriesTable {
 public:
  struct UnitRange {
    std::string unit;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
  };

  TimeSeriesTable() = default;

  // Sorts rows and validates the panel invariants.
  static TimeSeriesTable build(std::vector<RowKey> keys, std::vector<std::string> names,
                               std::vector<std::vector<double>> columns) {
    if (names.size() != columns.size()) throw DataError("column name/value count mismatch");
    for (const auto& c : columns) {
      if (c.size() != keys.size()) throw DataError("column length does not match row count");
    }
    {
      auto sorted = names;
      std::sort(sorted.begin(), sorted.end());
      auto dup = std::adjacent_find(sorted.begin(), sorted.end());
      if (dup != sorted.end()) throw DataError("duplicate column name '" + *dup + "'");
    }
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    TimeSeriesTable t;
    t.names_ = std::move(names);
    t.keys_.reserve(keys.size());
    for (auto i : order) t.keys_.push_back(keys[i]);
    t.columns_.resize(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      t.columns_[c].reserve(order.size());
      for (auto i : order) t.columns_[c].push_back(columns[c][i]);
    }
    t.validate();
    return t;
  }

  std::size_t rows() const { return keys_.size(); }
  std::size_t cols() const { return names_.size(); }
  const std::vector<RowKey>& keys() const { return keys_; }
  const std::vector<std::string>& column_names() const { return names_; }

  bool has_column(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }

  std::size_t column_index(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DataError("missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
  }

  std::span<const double> column(std::string_view name) const { return columns_[column_index(name)]; }
  std::span<const double> column(std::size_t idx) const { return columns_.at(idx); }

  double at(std::size_t row, std::string_view name) const { return column(name)[row]; }

  std::vector<UnitRange> unit_ranges() const {
    std::vector<UnitRange> out;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (out.empty() || out.back().unit != keys_[i].unit) out.push_back({keys_[i].unit, i, i});
      out.back().end = i + 1;
    }
    return out;
  }

  std::vector<std::string> units() const {
    std::vector<std::string> out;
    for (auto& r : unit_ranges()) out.push_back(r.unit);
    return out;
  }

  // Row index of (unit, month), or rows() when absent.
  std::size_t find_row(const RowKey& key) const {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return rows();
    return static_cast<std::size_t>(it - keys_.begin());
  }

  TimeSeriesTable with_column(std::string name, std::vector<double> values) const {
    if (has_column(name)) throw DataError("duplicate column name '" + name + "'");
    if (values.size() != rows()) throw DataError("column length does not match row count");
    TimeSeriesTable t = *this;
    t.names_.push_back(std::move(name));
    t.columns_.push_back(std::move(values));
    return t;
  }

  // Keeps the listed rows (indices into this table).
  TimeSeriesTable select_rows(std::span<const std::size_t> rows) const {
    std::vector<RowKey> keys;
    std::vector<std::vector<double>> cols(cols_count());
    for (auto r : rows) {
      keys.push_back(keys_.at(r));
      for (std::size_t c = 0; c < cols_count(); ++c) cols[c].push_back(columns_[c][r]);
    }
    return build(std::move(keys), names_, std::move(cols));
  }

  TimeSeriesTable select_columns(const std::vector<std::string>& names) const {
    std::vector<std::vector<double>> cols;
    for (auto& n : names) {
      auto s = column(n);
      cols.emplace_back(s.begin(), s.end());
    }
    TimeSeriesTable t;
    t.keys_ = keys_;
    t.names_ = names;
    t.columns_ = std::move(cols);
    return t;
  }

  friend bool operator==(const TimeSeriesTable& a, const TimeSeriesTable& b) {
    if (a.keys_ != b.keys_ || a.names_ != b.names_) return false;
    for (std::size_t c = 0; c < a.columns_.size(); ++c) {
      for (std::size_t r = 0; r < a.rows(); ++r) {
        double x = a.columns_[c][r], y = b.columns_[c][r];
        if (is_missing(x) != is_missing(y)) return false;
        if (!is_missing(x) && x != y) return false;
      }
    }
    return true;
  }

 private:
  std::size_t cols_count() const { return columns_.size(); }

  void validate() const {
    for (std::size_t i = 1; i < keys_.size(); ++i) {
      const auto& prev = keys_[i - 1];
      const auto& cur = keys_[i];
      if (prev == cur) throw DataError("duplicate row for " + cur.str());
      if (prev.unit == cur.unit && cur.month.index() != prev.month.index() + 1) {
        throw DataError("calendar gap in unit " + cur.unit + ": " + prev.month.plus(1).str() +
                        " missing before " + cur.month.str());
      }
    }
  }

  std::vector<RowKey> keys_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

struct TableSchema {
  // Numeric columns to load. Empty means every non-key column.
  std::vector<std::string> columns;
  // When set, interior runs of at most two empty cells are filled by linear
  // interpolation; otherwise any empty cell is rejected.
  bool interpolate_short_gaps = false;
};

namespace detail {

inline void interpolate_gaps(const TimeSeriesTable::UnitRange& range, std::vector<double>& col,
                             const std::string& name, const std::vector<RowKey>& keys) {
  std::size_t i = range.begin;
  while (i < range.end) {
    if (!is_missing(col[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < range.end && is_missing(col[j])) ++j;
    if (i == range.begin || j == range.end || j - i > 2) {
      throw DataError("missing value in column '" + name + "' at " + keys[i].str() +
                      " cannot be interpolated");
    }
    double left = col[i - 1], right = col[j];
    double span = static_cast<double>(j - i + 1);
    for (std::size_t k = i; k < j; ++k) {
      col[k] = left + (right - left) * static_cast<double>(k - i + 1) / span;
    }
    i = j;
  }
}

}  // namespace detail

// Reads `unit,date,<var>...` delimited text with dates as YYYY-MM.
inline TimeSeriesTable load_table(std::istream& in, const TableSchema& schema = {}) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: header row missing");
  auto header = text::split(line, ',');
  if (header.size() < 2 || header[0] != "unit" || header[1] != "date") {
    throw DataError("header must start with 'unit,date'");
  }
  std::vector<std::string> names;
  std::vector<std::size_t> source_pos;
  if (schema.columns.empty()) {
    for (std::size_t i = 2; i < header.size(); ++i) {
      names.emplace_back(header[i]);
      source_pos.push_back(i);
    }
  } else {
    for (const auto& want : schema.columns) {
      auto it = std::find(header.begin() + 2, header.end(), want);
      if (it == header.end()) throw DataError("declared column '" + want + "' not in header");
      names.push_back(want);
      source_pos.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  }

  std::vector<RowKey> keys;
  std::vector<std::vector<double>> cols(names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto cells = text::split(line, ',');
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    keys.push_back({std::string(cells[0]), YearMonth::parse(cells[1])});
    for (std::size_t c = 0; c < names.size(); ++c) {
      auto cell = cells[source_pos[c]];
      double v = kMissing;
      if (!cell.empty() && !text::parse_double(cell, v)) {
        throw DataError("line " + std::to_string(line_no) + ": non-numeric value '" + std::string(cell) +
                        "' in column '" + names[c] + "'");
      }
      cols[c].push_back(v);
    }
  }

  auto table = TimeSeriesTable::build(std::move(keys), names, std::move(cols));
  bool any_missing = false;
  for (std::size_t c = 0; c < table.cols() && !any_missing; ++c) {
    for (double v : table.column(c)) any_missing |= is_missing(v);
  }
  if (!any_missing) return table;

  std::vector<std::vector<double>> filled;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    auto src = table.column(c);
    filled.emplace_back(src.begin(), src.end());
    if (!schema.interpolate_short_gaps) {
      for (std::size_t r = 0; r < table.rows(); ++r) {
        if (is_missing(filled[c][r])) {
          throw DataError("missing value in column '" + names[c] + "' at " + table.keys()[r].str());
        }
      }
      continue;
    }
    for (const auto& range : table.unit_ranges()) {
      detail::interpolate_gaps(range, filled[c], names[c], table.keys());
    }
  }
  return TimeSeriesTable::build(table.keys(), names, std::move(filled));
}

inline TimeSeriesTable load_table(std::string_view text, const TableSchema& schema = {}) {
  std::istringstream in{std::string(text)};
  return load_table(in, schema);
}

inline void emit_table(const TimeSeriesTable& table, std::ostream& out) {
  out << "unit,date";
  for (const auto& n : table.column_names()) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out << table.keys()[r].unit << ',' << table.keys()[r].month.str();
    for (std::size_t c = 0; c < table.cols(); ++c) out << ',' << text::format_double(table.column(c)[r]);
    out << '\n';
  }
}

inline std::string emit_table(const TimeSeriesTable& table) {
  std::ostringstream out;
  emit_table(table, out);
  return out.str();
}

}  // namespace droughtens
