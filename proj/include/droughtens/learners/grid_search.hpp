#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/parallel.hpp"
#include "droughtens/learners/bagging.hpp"

namespace droughtens::learners {

// gamma is expressed as a multiple of 1/d so one grid serves every formula width.
struct SvrGridPoint {
  double cost = 32.0;
  double epsilon = 0.2;
  double gamma_factor = 1.0;

  bool operator==(const SvrGridPoint&) const = default;
};

inline std::vector<SvrGridPoint> default_svr_grid() {
  std::vector<SvrGridPoint> grid;
  for (int p = -2; p <= 6; ++p) {
    for (double eps : {0.05, 0.1, 0.2, 0.3, 0.4}) {
      for (double g : {1.0, 2.0, 0.5}) grid.push_back({std::ldexp(1.0, p), eps, g});
    }
  }
  return grid;
}

struct GridSearchResult {
  SvrGridPoint best;
  std::vector<double> scores;  // aligned with the grid; -inf where training failed
};

// Mean bagged validation R² of each grid point over `formulas`; the first
// point reaching the maximum wins.
inline GridSearchResult grid_search_svr(const indices::SupervisedDataset& in_sample,
                                        const std::vector<modelspace::ModelFormula>& formulas,
                                        const std::vector<SvrGridPoint>& grid, const SplitPlan& plan,
                                        const LearnerConfig& base, std::uint64_t seed, unsigned threads = 1) {
  if (grid.empty()) throw ConfigError("SVR grid is empty");
  if (formulas.empty()) throw ConfigError("SVR grid search needs at least one formula");
  GridSearchResult out;
  out.scores.assign(grid.size(), 0.0);
  const std::size_t tasks = grid.size() * formulas.size();
  std::vector<double> cell(tasks);
  parallel_for(tasks, threads, [&](std::size_t t) {
    const auto& point = grid[t / formulas.size()];
    const auto& formula = formulas[t % formulas.size()];
    LearnerConfig cfg = base;
    cfg.svr.cost = point.cost;
    cfg.svr.epsilon = point.epsilon;
    cfg.svr.gamma = point.gamma_factor / static_cast<double>(formula.predictors.size());
    try {
      cell[t] = bagged_fit(formula, Technique::Svr, in_sample, plan, cfg, seed).validation_r2;
    } catch (const Error&) {
      cell[t] = -std::numeric_limits<double>::infinity();
    }
  });
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t f = 0; f < formulas.size(); ++f) sum += cell[g * formulas.size() + f];
    out.scores[g] = sum / static_cast<double>(formulas.size());
    if (out.scores[g] > out.scores[best]) best = g;
  }
  out.best = grid[best];
  return out;
}

}  // namespace droughtens::learners
