#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "droughtens/core/errors.hpp"

namespace droughtens::stats {

struct OlsFit {
  Eigen::VectorXd coefficients;  // intercept first
  double rss = 0.0;
  double tss = 0.0;
  double r2() const { return tss > 0.0 ? 1.0 - rss / tss : 0.0; }
};

enum class RankPolicy {
  Throw,       // rank-deficient design -> NumericalError
  MinimumNorm  // rank-deficient design -> minimum-norm least squares
};

// Least squares with intercept on the listed columns of X.
// `ridge` > 0 adds lambda * I on the slope block instead.
inline OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<int>& columns,
                  double ridge = 0.0, RankPolicy policy = RankPolicy::Throw) {
  const auto n = x.rows();
  const auto k = static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXd design(n, k + 1);
  design.col(0).setOnes();
  for (Eigen::Index j = 0; j < k; ++j) design.col(j + 1) = x.col(columns[static_cast<std::size_t>(j)]);

  OlsFit fit;
  const double ybar = y.mean();
  fit.tss = (y.array() - ybar).square().sum();
  if (ridge > 0.0) {
    Eigen::MatrixXd gram = design.transpose() * design;
    for (Eigen::Index j = 1; j <= k; ++j) gram(j, j) += ridge;
    fit.coefficients = gram.ldlt().solve(design.transpose() * y);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    if (cod.rank() < k + 1 && policy == RankPolicy::Throw) throw NumericalError("singular design matrix");
    fit.coefficients = cod.solve(y);
  }
  fit.rss = (y - design * fit.coefficients).squaredNorm();
  return fit;
}

}  // namespace droughtens::stats
