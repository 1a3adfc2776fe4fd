#pragma once

#include <span>

#include "droughtens/core/errors.hpp"
#include "droughtens/stats/descriptive.hpp"

namespace droughtens::varselect {

// Pearson correlation of mid-ranked data.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman inputs differ in length");
  if (x.size() < 3) throw DataError("spearman needs at least three pairs");
  if (stats::is_constant(x) || stats::is_constant(y)) throw DataError("spearman undefined for a constant input");
  const auto rx = stats::average_ranks(x);
  const auto ry = stats::average_ranks(y);
  return stats::pearson(rx, ry);
}

}  // namespace droughtens::varselect
