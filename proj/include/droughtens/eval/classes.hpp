#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/stats/descriptive.hpp"

namespace droughtens::eval {

// Vegetation-deficit classes on VCI3M; lower bounds inclusive.
struct DroughtClass {
  int value = 5;  // 1 (extreme deficit) .. 5 (above normal)

  std::string_view label() const {
    static constexpr std::array<std::string_view, 5> labels = {
        "Extreme vegetation deficit", "Severe vegetation deficit", "Moderate vegetation deficit",
        "Normal vegetation conditions", "Above normal vegetation conditions"};
    return labels.at(static_cast<std::size_t>(value - 1));
  }
  bool is_drought() const { return value <= 3; }
  friend auto operator<=>(const DroughtClass&, const DroughtClass&) = default;
};

inline constexpr std::array<double, 4> kClassLowerBounds = {10.0, 20.0, 35.0, 50.0};

inline DroughtClass classify_vci3m(double vci3m) {
  if (!std::isfinite(vci3m)) throw DataError("cannot classify a non-finite VCI3M value");
  int c = 1;
  for (double b : kClassLowerBounds) {
    if (vci3m >= b) ++c;
  }
  return DroughtClass{c};
}

inline std::vector<DroughtClass> classify_all(std::span<const double> values) {
  std::vector<DroughtClass> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(classify_vci3m(v));
  return out;
}

inline double accuracy(std::span<const DroughtClass> predicted, std::span<const DroughtClass> actual) {
  if (predicted.size() != actual.size()) throw DataError("accuracy inputs differ in length");
  if (actual.empty()) throw DataError("accuracy needs at least one row");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) hits += predicted[i] == actual[i];
  return static_cast<double>(hits) / static_cast<double>(actual.size());
}

// Mann-Whitney AUROC with mid-rank tie correction.
inline double auroc_binary(std::span<const double> scores, const std::vector<bool>& events) {
  if (scores.size() != events.size()) throw DataError("auroc inputs differ in length");
  std::size_t pos = 0;
  for (bool e : events) pos += e ? 1 : 0;
  const std::size_t neg = events.size() - pos;
  if (pos == 0 || neg == 0) throw DataError("auroc needs both events and non-events");
  const auto ranks = stats::average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (events[i]) rank_sum += ranks[i];
  }
  const double p = static_cast<double>(pos), q = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

// Drought-event AUROC: event = actual class 1..3, score = -predicted VCI3M.
inline double drought_auroc(std::span<const double> predicted_vci, std::span<const double> actual_vci) {
  std::vector<double> scores;
  std::vector<bool> events;
  for (std::size_t i = 0; i < predicted_vci.size(); ++i) {
    scores.push_back(-predicted_vci[i]);
    events.push_back(classify_vci3m(actual_vci[i]).is_drought());
  }
  return auroc_binary(scores, events);
}

// Among months whose actual class is 1..3, the share predicted as 1..3.
inline double moderate_extreme_recall(std::span<const DroughtClass> predicted, std::span<const DroughtClass> actual) {
  if (predicted.size() != actual.size()) throw DataError("recall inputs differ in length");
  std::size_t drought = 0, caught = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!actual[i].is_drought()) continue;
    ++drought;
    caught += predicted[i].is_drought();
  }
  if (drought == 0) throw DataError("no moderate-to-extreme drought months to score");
  return static_cast<double>(caught) / static_cast<double>(drought);
}

// Among months whose actual class is 1..3, the share whose class is exactly right.
inline double drought_exact_agreement(std::span<const DroughtClass> predicted, std::span<const DroughtClass> actual) {
  if (predicted.size() != actual.size()) throw DataError("agreement inputs differ in length");
  std::size_t drought = 0, exact = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!actual[i].is_drought()) continue;
    ++drought;
    exact += predicted[i] == actual[i];
  }
  if (drought == 0) throw DataError("no moderate-to-extreme drought months to score");
  return static_cast<double>(exact) / static_cast<double>(drought);
}

}  // namespace droughtens::eval
