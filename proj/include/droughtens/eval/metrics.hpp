#pragma once

#include <cmath>
#include <span>

#include "droughtens/core/errors.hpp"
#include "droughtens/stats/descriptive.hpp"

namespace droughtens::eval {

// Squared Pearson correlation between predicted and actual.
inline double r2(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw DataError("r2 inputs differ in length");
  if (predicted.size() < 3) throw DataError("r2 needs at least three points");
  const double r = stats::pearson(predicted, actual);
  return r * r;
}

// r2 for training bookkeeping: a constant prediction scores 0.
inline double r2_or_zero(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() < 3 || stats::is_constant(predicted) || stats::is_constant(actual)) return 0.0;
  return r2(predicted, actual);
}

// Sign of the correlation behind r2; anti-correlated predictors get -1.
inline int correlation_sign(std::span<const double> predicted, std::span<const double> actual) {
  if (stats::is_constant(predicted) || stats::is_constant(actual)) return 0;
  return stats::pearson(predicted, actual) < 0.0 ? -1 : 1;
}

// Coefficient of determination 1 - RSS/TSS.
inline double r2_determination(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size() || actual.empty()) throw DataError("r2 inputs differ in length");
  const double m = stats::mean(actual);
  double rss = 0.0, tss = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    rss += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    tss += (actual[i] - m) * (actual[i] - m);
  }
  if (!(tss > 0.0)) throw DataError("r2 undefined for a constant target");
  return 1.0 - rss / tss;
}

struct ErrorMetrics {
  double rmse = 0.0;
  double mae = 0.0;
  double mape = 0.0;  // percent; NaN when every row was skipped
  std::size_t mape_skipped = 0;
};

// MAPE skips rows with |actual| < 1e-9 and reports how many were skipped.
inline ErrorMetrics error_metrics(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw DataError("error metric inputs differ in length");
  if (actual.empty()) throw DataError("error metrics need at least one row");
  ErrorMetrics m;
  double se = 0.0, ae = 0.0, ape = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = predicted[i] - actual[i];
    se += e * e;
    ae += std::abs(e);
    if (std::abs(actual[i]) < 1e-9) {
      ++m.mape_skipped;
    } else {
      ape += std::abs(e / actual[i]);
      ++used;
    }
  }
  const double n = static_cast<double>(actual.size());
  m.rmse = std::sqrt(se / n);
  m.mae = ae / n;
  m.mape = used ? 100.0 * ape / static_cast<double>(used) : std::nan("");
  return m;
}

}  // namespace droughtens::eval
