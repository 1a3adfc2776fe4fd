#pragma once

#include <cstdint>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/indices/catalog.hpp"
#include "droughtens/modelspace/formula.hpp"

namespace droughtens::modelspace {

struct ModelSpaceCounts {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_length;  // index k = formulas with k predictors (index 0 unused)
};

inline std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Every non-empty subset of n variables: C(n, k) per length, 2^n - 1 total.
inline ModelSpaceCounts count_unconstrained(unsigned n_vars) {
  if (n_vars < 1 || n_vars > 63) throw ConfigError("n_vars must lie in 1..63");
  ModelSpaceCounts c;
  c.per_length.assign(n_vars + 1, 0);
  for (unsigned k = 1; k <= n_vars; ++k) c.per_length[k] = binomial(n_vars, k);
  c.total = (std::uint64_t{1} << n_vars) - 1;
  return c;
}

// All non-empty formulas with at most one variable per category:
// (|V| + 1)(|P| + 1)(|I| + 1) - 1 of them. Ordered by vegetation choice, then
// precipitation, then influencer, each in catalog order with "none" first.
inline std::vector<ModelFormula> enumerate_constrained(const indices::VariableCatalog& catalog,
                                                       std::string_view target = "VCI3M", int lead = 1) {
  using indices::Category;
  const auto veg = catalog.names_in(Category::Vegetation);
  const auto pre = catalog.names_in(Category::Precipitation);
  const auto inf = catalog.names_in(Category::Influencer);
  if (veg.empty() || pre.empty() || inf.empty() || veg.size() + pre.size() + inf.size() != catalog.size()) {
    throw ConfigError("catalog is not partitioned into vegetation, precipitation and influencer variables");
  }
  std::vector<ModelFormula> out;
  for (std::size_t v = 0; v <= veg.size(); ++v) {
    for (std::size_t p = 0; p <= pre.size(); ++p) {
      for (std::size_t i = 0; i <= inf.size(); ++i) {
        if (v == 0 && p == 0 && i == 0) continue;
        ModelFormula f;
        f.target = std::string(target);
        f.lead = lead;
        if (v) f.predictors.push_back({veg[v - 1], Category::Vegetation, 1});
        if (p) f.predictors.push_back({pre[p - 1], Category::Precipitation, 1});
        if (i) f.predictors.push_back({inf[i - 1], Category::Influencer, 1});
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

}  // namespace droughtens::modelspace
