#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/core/table.hpp"

namespace droughtens {

struct SplitPlan {
  int holdout_months = 24;  // trailing months per unit kept out of sample
  double ratio = 0.7;       // TRAIN share of in-sample rows
  int repeats = 5;          // bagging iterations
  std::uint64_t seed = 0;

  void validate() const {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
    if (repeats < 1) throw ConfigError("split repeats must be >= 1");
    if (holdout_months < 1) throw ConfigError("holdout_months must be >= 1");
  }

  void validate(const TimeSeriesTable& table) const {
    validate();
    for (const auto& r : table.unit_ranges()) {
      if (static_cast<std::size_t>(holdout_months) >= r.size()) {
        throw DataError("holdout of " + std::to_string(holdout_months) + " months is not shorter than unit " +
                        r.unit + " (" + std::to_string(r.size()) + " months)");
      }
    }
  }
};

enum class SplitLabel : std::uint8_t { Train, Validation };

struct InOutSplit {
  TimeSeriesTable in_sample;
  TimeSeriesTable out_sample;
};

inline InOutSplit split_in_out(const TimeSeriesTable& table, const SplitPlan& plan) {
  plan.validate(table);
  std::vector<std::size_t> in_rows, out_rows;
  for (const auto& r : table.unit_ranges()) {
    std::size_t cut = r.end - static_cast<std::size_t>(plan.holdout_months);
    for (std::size_t i = r.begin; i < cut; ++i) in_rows.push_back(i);
    for (std::size_t i = cut; i < r.end; ++i) out_rows.push_back(i);
  }
  return {table.select_rows(in_rows), table.select_rows(out_rows)};
}

// Rank of each row in a seeded pseudo-random order. Keyed by (unit, month)
// so the result does not depend on row positions.
inline std::uint64_t split_rank_key(const SplitPlan& plan, int repeat, const RowKey& key) {
  std::uint64_t h = derive_seed(plan.seed, "train-validation", "", static_cast<std::uint64_t>(repeat));
  h = hash_combine(h, fnv1a64(key.unit));
  h = hash_combine(h, static_cast<std::uint64_t>(key.month.index()));
  return h;
}

// floor(ratio * n) rows are labelled TRAIN, the rest VALIDATION.
inline std::vector<SplitLabel> assign_train_validation(std::span<const RowKey> keys, const SplitPlan& plan,
                                                       int repeat) {
  plan.validate();
  if (repeat < 0 || repeat >= plan.repeats) throw ConfigError("repeat index out of range");
  const std::size_t n = keys.size();
  std::vector<std::tuple<std::uint64_t, const RowKey*, std::size_t>> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) order.emplace_back(split_rank_key(plan, repeat, keys[i]), &keys[i], i);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return *std::get<1>(a) < *std::get<1>(b);
  });
  const auto n_train = static_cast<std::size_t>(std::floor(plan.ratio * static_cast<double>(n) + 1e-9));
  std::vector<SplitLabel> labels(n, SplitLabel::Validation);
  for (std::size_t k = 0; k < n_train; ++k) labels[std::get<2>(order[k])] = SplitLabel::Train;
  return labels;
}

inline std::vector<SplitLabel> assign_train_validation(const TimeSeriesTable& in_sample, const SplitPlan& plan,
                                                       int repeat) {
  return assign_train_validation(std::span<const RowKey>(in_sample.keys()), plan, repeat);
}

}  // namespace droughtens
