#pragma once

#include <algorithm>
#include <vector>

#include "droughtens/core/errors.hpp"

namespace droughtens::ensemble {

using MemberPredictions = std::vector<std::vector<double>>;  // [member][row]

namespace detail {

inline std::size_t aligned_rows(const MemberPredictions& preds) {
  if (preds.empty()) throw DataError("combiner needs at least one member");
  const auto n = preds.front().size();
  for (const auto& p : preds) {
    if (p.size() != n) throw DataError("combiner: member predictions have different row counts");
  }
  return n;
}

}  // namespace detail

inline std::vector<double> combine_simple(const MemberPredictions& preds) {
  const auto n = detail::aligned_rows(preds);
  std::vector<double> out(n, 0.0);
  for (const auto& p : preds) {
    for (std::size_t r = 0; r < n; ++r) out[r] += p[r];
  }
  for (auto& v : out) v /= static_cast<double>(preds.size());
  return out;
}

// Min-max stretched scores normalised to sum 1. Equal scores give equal weights.
inline std::vector<double> minmax_weights(const std::vector<double>& scores) {
  if (scores.empty()) throw DataError("weights need at least one score");
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  std::vector<double> w(scores.size(), 1.0 / static_cast<double>(scores.size()));
  if (!(*hi > *lo)) return w;
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = (scores[i] - *lo) / (*hi - *lo);
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

inline std::vector<double> combine_with_weights(const MemberPredictions& preds, const std::vector<double>& w) {
  const auto n = detail::aligned_rows(preds);
  if (w.size() != preds.size()) throw DataError("combiner: weights not aligned with members");
  std::vector<double> out(n, 0.0);
  for (std::size_t m = 0; m < preds.size(); ++m) {
    if (w[m] == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) out[r] += w[m] * preds[m][r];
  }
  return out;
}

inline std::vector<double> combine_weighted(const MemberPredictions& preds, const std::vector<double>& scores) {
  if (scores.size() != preds.size()) throw DataError("combiner: scores not aligned with members");
  return combine_with_weights(preds, minmax_weights(scores));
}

}  // namespace droughtens::ensemble
