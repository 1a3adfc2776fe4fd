#pragma once

#include <span>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/table.hpp"

namespace droughtens::indices {

// Trailing mean over `window` months; the first window-1 values are missing,
// as is any window touching a missing input.
inline std::vector<double> rolling_mean(std::span<const double> series, int window) {
  if (window < 1) throw ConfigError("rolling window must be >= 1");
  if (static_cast<std::size_t>(window) > series.size()) {
    throw DataError("rolling window " + std::to_string(window) + " exceeds series length " +
                    std::to_string(series.size()));
  }
  std::vector<double> out(series.size(), kMissing);
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t t = w - 1; t < series.size(); ++t) {
    double sum = 0.0;
    for (std::size_t k = t + 1 - w; k <= t; ++k) sum += series[k];
    out[t] = sum / static_cast<double>(window);
  }
  return out;
}

// out[t] = series[t - k]; the first k values are missing.
inline std::vector<double> lag(std::span<const double> series, int k) {
  if (k < 0) throw ConfigError("lag must be >= 0");
  std::vector<double> out(series.size(), kMissing);
  for (std::size_t t = static_cast<std::size_t>(k); t < series.size(); ++t) {
    out[t] = series[t - static_cast<std::size_t>(k)];
  }
  return out;
}

}  // namespace droughtens::indices
