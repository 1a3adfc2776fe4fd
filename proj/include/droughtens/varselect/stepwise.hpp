#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "droughtens/core/errors.hpp"
#include "droughtens/stats/ols.hpp"

namespace droughtens::varselect {

// Design matrix (n x p) and response used by the selection statistics.
struct RegressionData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> names;

  std::size_t n() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(x.cols()); }
};

inline constexpr double kDegenerateRss = 1e-12;

// n ln(RSS / n) + 2 (k + 2): k slopes, the intercept and the error variance.
// Rank-deficient designs are solved in the minimum-norm sense; the penalty
// still counts every listed variable.
inline double aic_linear(const RegressionData& d, const std::vector<int>& subset) {
  const double n = static_cast<double>(d.n());
  const double k = static_cast<double>(subset.size());
  if (!(n > k + 2.0)) throw DataError("AIC needs more rows than variables + 2");
  const auto fit = stats::ols(d.x, d.y, subset, 0.0, stats::RankPolicy::MinimumNorm);
  if (fit.rss < kDegenerateRss) throw NumericalError("degenerate fit: residual sum of squares is ~0");
  return n * std::log(fit.rss / n) + 2.0 * (k + 2.0);
}

struct StepwiseStep {
  std::string move;  // "add <name>" / "drop <name>"
  double aic = 0.0;
};

struct StepwiseResult {
  std::vector<int> selected;  // ascending candidate order
  double aic = 0.0;
  std::vector<StepwiseStep> steps;
};

// Bidirectional stepwise under AIC from the empty model. Each iteration picks
// the single add or drop with the lowest AIC; stops when nothing lowers it.
// Ties go to the earliest candidate.
inline StepwiseResult stepwise_bidirectional(const RegressionData& d, const std::vector<int>& candidates) {
  if (candidates.size() > 20) throw ConfigError("stepwise selection supports at most 20 candidates");
  StepwiseResult res;
  res.aic = aic_linear(d, {});
  std::vector<bool> in(candidates.size(), false);
  auto current_subset = [&](int flip) {
    std::vector<int> s;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      bool member = in[i] != (static_cast<int>(i) == flip);
      if (member) s.push_back(candidates[i]);
    }
    return s;
  };
  for (;;) {
    int best = -1;
    double best_aic = res.aic;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto subset = current_subset(static_cast<int>(i));
      if (subset.size() + 2 >= d.n()) continue;
      const double aic = aic_linear(d, subset);
      if (aic < best_aic) {
        best_aic = aic;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    in[static_cast<std::size_t>(best)] = !in[static_cast<std::size_t>(best)];
    const auto& name = d.names.at(static_cast<std::size_t>(candidates[static_cast<std::size_t>(best)]));
    res.steps.push_back({std::string(in[static_cast<std::size_t>(best)] ? "add " : "drop ") + name, best_aic});
    res.aic = best_aic;
  }
  res.selected = current_subset(-1);
  return res;
}

}  // namespace droughtens::varselect
