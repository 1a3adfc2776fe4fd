#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "droughtens/learners/matrix.hpp"
#include "droughtens/learners/svr.hpp"

namespace droughtens::fixtures {

using learners::RowStore;

// Projected gradient ascent on the 2n-dimensional dual over
// {0 <= a, a* <= C, sum (a - a*) = 0}; the projection solves for the
// multiplier of the equality constraint by bisection.
inline double qp_oracle(const RowStore& rows, double gamma, double c, double eps) {
  const std::size_t n = rows.size();
  const auto k = learners::rbf_kernel_matrix(rows.view(), gamma);
  std::vector<double> a(n, 0.0), as(n, 0.0);
  auto objective = [&] {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double bi = a[i] - as[i];
      lin += rows.y[i] * bi - eps * (a[i] + as[i]);
      for (std::size_t j = 0; j < n; ++j) quad += bi * k[i * n + j] * (a[j] - as[j]);
    }
    return lin - 0.5 * quad;
  };
  auto project = [&](std::vector<double>& va, std::vector<double>& vs) {
    auto clip = [&](double v) { return std::clamp(v, 0.0, c); };
    auto balance = [&](double lam) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += clip(va[i] - lam) - clip(vs[i] + lam);
      return s;
    };
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (balance(mid) > 0.0 ? lo : hi) = mid;
    }
    const double lam = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < n; ++i) {
      va[i] = clip(va[i] - lam);
      vs[i] = clip(vs[i] + lam);
    }
  };
  const double step = 1.0 / (2.0 * static_cast<double>(n));
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> na(n), ns(n);
    for (std::size_t i = 0; i < n; ++i) {
      double kb = 0.0;
      for (std::size_t j = 0; j < n; ++j) kb += k[i * n + j] * (a[j] - as[j]);
      na[i] = a[i] + step * (rows.y[i] - eps - kb);
      ns[i] = as[i] + step * (-rows.y[i] - eps + kb);
    }
    project(na, ns);
    a = na;
    as = ns;
  }
  return objective();
}

// Five dual problems of three to six points each.
inline std::vector<RowStore> small_svr_problems() {
  std::vector<RowStore> out;
  RowStore a{{}, {}, 1};
  const std::vector<double> ya = {0.1, 0.9, 0.4, -0.3, 0.6};
  for (std::size_t i = 0; i < ya.size(); ++i) a.push(std::vector<double>{0.25 * static_cast<double>(i)}, ya[i]);
  out.push_back(std::move(a));
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n : {3u, 4u, 6u, 6u}) {
    RowStore s{{}, {}, 2};
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> x = {u(rng), u(rng)};
      s.push(x, 2.0 * x[0] - x[1] + 0.5 * u(rng));
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Squared correlation of the simple average of an explicit subset, computed
// without the library.
inline double subset_r2(const std::vector<std::vector<double>>& preds, const std::vector<double>& y, unsigned mask) {
  std::vector<double> avg(y.size(), 0.0);
  int k = 0;
  for (std::size_t m = 0; m < preds.size(); ++m) {
    if (!(mask & (1u << m))) continue;
    ++k;
    for (std::size_t r = 0; r < y.size(); ++r) avg[r] += preds[m][r];
  }
  for (auto& v : avg) v /= k;
  const double n = static_cast<double>(y.size());
  const double ma = std::accumulate(avg.begin(), avg.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, syy = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    sab += (avg[r] - ma) * (y[r] - my);
    saa += (avg[r] - ma) * (avg[r] - ma);
    syy += (y[r] - my) * (y[r] - my);
  }
  return sab * sab / (saa * syy);
}

struct SignalPool {
  std::vector<double> target;
  std::vector<std::vector<double>> preds;  // ranked best first
};

// Seven members track the target with independent, similar-sized errors; five are noise
// with the target's marginal spread.
inline SignalPool signal_pool(std::uint64_t seed, std::size_t rows = 300) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  SignalPool p;
  for (std::size_t r = 0; r < rows; ++r) p.target.push_back(50.0 + 15.0 * z(rng));
  for (int m = 0; m < 12; ++m) {
    std::vector<double> v;
    for (std::size_t r = 0; r < rows; ++r) {
      v.push_back(m < 7 ? p.target[r] + (8.0 + 0.1 * m) * z(rng) : 50.0 + 15.0 * z(rng));
    }
    p.preds.push_back(std::move(v));
  }
  return p;
}

}  // namespace droughtens::fixtures
