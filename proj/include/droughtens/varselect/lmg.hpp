#pragma once

#include <cstdint>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/stats/ols.hpp"
#include "droughtens/varselect/stepwise.hpp"

namespace droughtens::varselect {

inline constexpr double kLmgRidge = 1e-8;

// R^2 of every subset of `vars`, indexed by bitmask. Singular subsets fall
// back to a tiny ridge penalty.
inline std::vector<double> subset_r2(const RegressionData& d, const std::vector<int>& vars) {
  const std::size_t p = vars.size();
  std::vector<double> r2(std::size_t{1} << p, 0.0);
  for (std::uint32_t mask = 1; mask < r2.size(); ++mask) {
    std::vector<int> cols;
    for (std::size_t j = 0; j < p; ++j) {
      if (mask & (1u << j)) cols.push_back(vars[j]);
    }
    try {
      r2[mask] = stats::ols(d.x, d.y, cols).r2();
    } catch (const NumericalError&) {
      r2[mask] = stats::ols(d.x, d.y, cols, kLmgRidge).r2();
    }
  }
  return r2;
}

// LMG relative importance: each variable's incremental R^2 averaged over all
// orderings, computed through subset weights |S|! (p - |S| - 1)! / p!.
inline std::vector<double> lmg_importance(const RegressionData& d, const std::vector<int>& vars) {
  const std::size_t p = vars.size();
  if (p == 0) return {};
  if (p > 12) throw ConfigError("LMG importance supports at most 12 variables");
  const auto r2 = subset_r2(d, vars);
  std::vector<double> fact(p + 1, 1.0);
  for (std::size_t i = 1; i <= p; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
  std::vector<double> share(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t mask = 0; mask < r2.size(); ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(__builtin_popcount(mask));
      const double weight = fact[s] * fact[p - s - 1] / fact[p];
      share[i] += weight * (r2[mask | bit] - r2[mask]);
    }
  }
  return share;
}

}  // namespace droughtens::varselect
