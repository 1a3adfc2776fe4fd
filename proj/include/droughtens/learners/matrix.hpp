#pragma once

#include <span>
#include <vector>

#include "droughtens/core/errors.hpp"

namespace droughtens::learners {

// Row-major design matrix view with its targets.
struct Rows {
  std::span<const double> x;  // n * dim
  std::span<const double> y;  // n (may be empty for prediction)
  std::size_t dim = 0;

  std::size_t size() const { return dim ? x.size() / dim : 0; }
  std::span<const double> row(std::size_t i) const { return x.subspan(i * dim, dim); }
};

// Owning counterpart of Rows.
struct RowStore {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t dim = 0;

  std::size_t size() const { return dim ? x.size() / dim : 0; }
  Rows view() const { return Rows{x, y, dim}; }
  void push(std::span<const double> row, double target) {
    x.insert(x.end(), row.begin(), row.end());
    y.push_back(target);
  }
};

}  // namespace droughtens::learners
