#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/learners/matrix.hpp"

namespace droughtens::learners {

// Min-max scaling fitted on the TRAIN fold. Values outside the fitted range
// map outside [0, 1]; nothing is clamped.
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;
  double target_min = 0.0;
  double target_max = 1.0;

  std::size_t dim() const { return min.size(); }

  double transform(std::size_t j, double v) const { return (v - min[j]) / (max[j] - min[j]); }

  std::vector<double> transform(Rows rows) const {
    if (rows.dim != dim()) throw DataError("scaler dimension mismatch");
    std::vector<double> out(rows.x.size());
    for (std::size_t i = 0; i < rows.x.size(); ++i) out[i] = transform(i % dim(), rows.x[i]);
    return out;
  }

  void transform_row(std::span<const double> in, std::span<double> out) const {
    for (std::size_t j = 0; j < dim(); ++j) out[j] = transform(j, in[j]);
  }

  double transform_target(double y) const { return (y - target_min) / (target_max - target_min); }
  double inverse_target(double s) const { return target_min + s * (target_max - target_min); }

  std::vector<double> transform_targets(std::span<const double> y) const {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = transform_target(y[i]);
    return out;
  }
};

inline Scaler fit_scaler(Rows train) {
  if (train.size() == 0) throw DataError("cannot fit a scaler on an empty fold");
  Scaler s;
  s.min.assign(train.dim, std::numeric_limits<double>::infinity());
  s.max.assign(train.dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < train.x.size(); ++i) {
    const auto j = i % train.dim;
    s.min[j] = std::min(s.min[j], train.x[i]);
    s.max[j] = std::max(s.max[j], train.x[i]);
  }
  for (std::size_t j = 0; j < train.dim; ++j) {
    if (!(s.max[j] > s.min[j])) throw DataError("constant feature " + std::to_string(j) + " cannot be scaled");
  }
  if (!train.y.empty()) {
    auto [lo, hi] = std::minmax_element(train.y.begin(), train.y.end());
    s.target_min = *lo;
    s.target_max = *hi;
    if (!(s.target_max > s.target_min)) {
      // Constant target: identity-width range keeps the transform invertible.
      s.target_max = s.target_min + 1.0;
    }
  }
  return s;
}

}  // namespace droughtens::learners
