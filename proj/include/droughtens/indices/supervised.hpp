#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/table.hpp"
#include "droughtens/core/text.hpp"

namespace droughtens::indices {

// Rows (unit, t): features are variables at month t, the target is the
// target variable at month t + lead of the same unit.
struct SupervisedDataset {
  std::vector<RowKey> keys;
  std::vector<YearMonth> target_months;
  std::vector<std::string> feature_names;
  std::vector<double> features;  // row-major, rows() x cols()
  std::vector<double> target;
  int lead = 1;
  std::string target_name = "VCI3M";

  std::size_t rows() const { return keys.size(); }
  std::size_t cols() const { return feature_names.size(); }
  double feature(std::size_t r, std::size_t c) const { return features[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {features.data() + r * cols(), cols()}; }

  std::size_t feature_index(std::string_view name) const {
    auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) throw DataError("feature '" + std::string(name) + "' not in dataset");
    return static_cast<std::size_t>(it - feature_names.begin());
  }

  std::vector<std::size_t> feature_indices(const std::vector<std::string>& names) const {
    std::vector<std::size_t> out;
    for (auto& n : names) out.push_back(feature_index(n));
    return out;
  }

  // Row-major matrix of the chosen feature columns.
  std::vector<double> gather(const std::vector<std::size_t>& columns) const {
    std::vector<double> out;
    out.reserve(rows() * columns.size());
    for (std::size_t r = 0; r < rows(); ++r) {
      for (auto c : columns) out.push_back(feature(r, c));
    }
    return out;
  }

  std::vector<double> column(std::string_view name) const {
    const auto c = feature_index(name);
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = feature(r, c);
    return out;
  }

  SupervisedDataset select_rows(std::span<const std::size_t> idx) const {
    SupervisedDataset d;
    d.feature_names = feature_names;
    d.lead = lead;
    d.target_name = target_name;
    for (auto r : idx) {
      d.keys.push_back(keys.at(r));
      d.target_months.push_back(target_months[r]);
      auto src = row(r);
      d.features.insert(d.features.end(), src.begin(), src.end());
      d.target.push_back(target[r]);
    }
    return d;
  }
};

// One row per (unit, t) where t + lead exists and neither the features nor the
// target are missing.
inline SupervisedDataset build_supervised(const TimeSeriesTable& table, const std::vector<std::string>& features,
                                          int lead = 1, std::string_view target = "VCI3M") {
  if (lead < 1) throw ConfigError("lead must be >= 1");
  SupervisedDataset d;
  d.feature_names = features;
  d.lead = lead;
  d.target_name = std::string(target);
  std::vector<std::span<const double>> cols;
  for (auto& f : features) cols.push_back(table.column(f));
  const auto y = table.column(target);
  for (const auto& r : table.unit_ranges()) {
    for (std::size_t t = r.begin; t + static_cast<std::size_t>(lead) < r.end; ++t) {
      const std::size_t tt = t + static_cast<std::size_t>(lead);
      if (is_missing(y[tt])) continue;
      bool ok = true;
      for (auto& c : cols) ok = ok && !is_missing(c[t]);
      if (!ok) continue;
      d.keys.push_back(table.keys()[t]);
      d.target_months.push_back(table.keys()[tt].month);
      for (auto& c : cols) d.features.push_back(c[t]);
      d.target.push_back(y[tt]);
    }
  }
  if (d.rows() == 0) throw DataError("supervised dataset is empty after filtering missing rows");
  return d;
}

struct SupervisedPartition {
  SupervisedDataset in_sample;
  SupervisedDataset out_sample;
};

// Rows whose target month lies in `out_sample` (matched by unit) form the
// out-of-sample set; every other row is in-sample.
inline SupervisedPartition partition_by_target(const SupervisedDataset& d, const TimeSeriesTable& out_sample) {
  std::vector<std::size_t> in_rows, out_rows;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    RowKey target_key{d.keys[r].unit, d.target_months[r]};
    (out_sample.find_row(target_key) < out_sample.rows() ? out_rows : in_rows).push_back(r);
  }
  return {d.select_rows(in_rows), d.select_rows(out_rows)};
}

inline void write_supervised(const SupervisedDataset& d, std::ostream& out) {
  out << "unit,date,target_date";
  for (auto& n : d.feature_names) out << ',' << n;
  out << ',' << d.target_name << "_lead" << d.lead << '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    out << d.keys[r].unit << ',' << d.keys[r].month.str() << ',' << d.target_months[r].str();
    for (std::size_t c = 0; c < d.cols(); ++c) out << ',' << text::format_double(d.feature(r, c));
    out << ',' << text::format_double(d.target[r]) << '\n';
  }
}

inline SupervisedDataset read_supervised(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty supervised dataset file");
  auto header = text::split(line, ',');
  if (header.size() < 4 || header[0] != "unit" || header[1] != "date" || header[2] != "target_date") {
    throw DataError("malformed supervised dataset header");
  }
  SupervisedDataset d;
  for (std::size_t i = 3; i + 1 < header.size(); ++i) d.feature_names.emplace_back(header[i]);
  const std::string last(header.back());
  const auto pos = last.rfind("_lead");
  if (pos == std::string::npos) throw DataError("malformed target column '" + last + "'");
  d.target_name = last.substr(0, pos);
  d.lead = std::stoi(last.substr(pos + 5));
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    auto cells = text::split(line, ',');
    if (cells.size() != header.size()) throw DataError("supervised dataset row has wrong cell count");
    d.keys.push_back({std::string(cells[0]), YearMonth::parse(cells[1])});
    d.target_months.push_back(YearMonth::parse(cells[2]));
    for (std::size_t i = 3; i < cells.size(); ++i) {
      double v;
      if (!text::parse_double(cells[i], v)) throw DataError("non-numeric cell in supervised dataset");
      (i + 1 < cells.size() ? d.features : d.target).push_back(v);
    }
  }
  return d;
}

}  // namespace droughtens::indices
