#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/learners/matrix.hpp"

namespace droughtens::learners {

struct SvrHyper {
  double cost = 32.0;
  double epsilon = 0.2;  // tube half-width, in target units
  double gamma = 0.0;    // RBF width; 0 means 1 / dim
  double tolerance = 1e-3;
  std::int64_t max_iterations = 0;  // 0: max(10^7, 100 n)
};

inline double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-gamma * d2);
}

// f(x) = sum_i coef_i K(sv_i, x) + bias with an RBF kernel.
struct SvrParams {
  std::size_t dim = 0;
  double gamma = 1.0;
  double cost = 1.0;
  double epsilon = 0.1;
  std::vector<double> support;  // n_sv * dim
  std::vector<double> coef;     // alpha - alpha*, |coef| <= cost
  double bias = 0.0;

  std::size_t support_count() const { return coef.size(); }

  double predict(std::span<const double> x) const {
    if (x.size() != dim) throw DataError("SVR input dimension mismatch");
    double f = bias;
    for (std::size_t i = 0; i < coef.size(); ++i) {
      f += coef[i] * rbf(std::span<const double>(support.data() + i * dim, dim), x, gamma);
    }
    return f;
  }
};

struct SvrTrainResult {
  SvrParams params;
  std::vector<double> beta;  // coefficient per training row (zeros included)
  std::int64_t iterations = 0;
  double kkt_violation = 0.0;
  double dual_objective = 0.0;            // maximisation form
  std::vector<double> objective_trace;    // per iteration, when requested
};

// Dual objective of epsilon-SVR in maximisation form:
// sum y_i b_i - eps sum |b_i| - 1/2 b^T K b.
inline double svr_dual_objective(std::span<const double> kernel, std::span<const double> y, double epsilon,
                                 std::span<const double> beta) {
  const std::size_t n = y.size();
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lin += y[i] * beta[i] - epsilon * std::abs(beta[i]);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += kernel[i * n + j] * beta[j];
    quad += beta[i] * s;
  }
  return lin - 0.5 * quad;
}

inline std::vector<double> rbf_kernel_matrix(Rows rows, double gamma) {
  const std::size_t n = rows.size();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) k[i * n + j] = k[j * n + i] = rbf(rows.row(i), rows.row(j), gamma);
  }
  return k;
}

// SMO on the 2n-variable dual (alpha, alpha*) with second-order working-set
// selection. Stops once the maximal KKT violation drops below the tolerance.
inline SvrTrainResult train_svr(Rows train, const SvrHyper& h, bool record_trace = false) {
  const std::size_t n = train.size();
  if (n == 0) throw DataError("cannot train SVR on an empty fold");
  if (!(h.cost > 0.0) || !(h.epsilon >= 0.0)) throw ConfigError("SVR needs C > 0 and epsilon >= 0");
  const double gamma = h.gamma > 0.0 ? h.gamma : 1.0 / static_cast<double>(train.dim);
  if (!(gamma > 0.0)) throw ConfigError("SVR gamma must be > 0");
  const double c = h.cost;
  const auto kernel = rbf_kernel_matrix(train, gamma);

  const std::size_t m = 2 * n;
  std::vector<double> alpha(m, 0.0), grad(m);
  std::vector<signed char> sign(m);
  for (std::size_t i = 0; i < n; ++i) {
    sign[i] = 1;
    sign[i + n] = -1;
    grad[i] = h.epsilon - train.y[i];
    grad[i + n] = h.epsilon + train.y[i];
  }
  const std::vector<double> p = grad;
  auto kval = [&](std::size_t a, std::size_t b) { return kernel[(a % n) * n + (b % n)]; };
  auto upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  auto objective = [&] {
    double f = 0.0;
    for (std::size_t t = 0; t < m; ++t) f += alpha[t] * (grad[t] + p[t]);
    return -0.5 * f;
  };

  constexpr double tau = 1e-12;
  const std::int64_t cap = h.max_iterations > 0 ? h.max_iterations
                                                 : std::max<std::int64_t>(10'000'000, 100 * static_cast<std::int64_t>(n));
  SvrTrainResult res;
  std::int64_t iter = 0;
  double violation = std::numeric_limits<double>::infinity();
  for (; iter < cap; ++iter) {
    // Working set: i maximises the first-order violation, j the second-order gain.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t gi = -1, gj = -1;
    for (std::size_t t = 0; t < m; ++t) {
      if (sign[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          gi = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        gi = static_cast<std::ptrdiff_t>(t);
      }
    }
    double best_obj = std::numeric_limits<double>::infinity();
    const std::size_t i = gi < 0 ? 0 : static_cast<std::size_t>(gi);
    for (std::size_t t = 0; t < m; ++t) {
      if (sign[t] == 1) {
        if (lower(t)) continue;
        const double diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        if (gi >= 0 && diff > 0.0) {
          const double quad = 2.0 - 2.0 * kval(i, t);
          const double obj = -(diff * diff) / std::max(quad, tau);
          if (obj <= best_obj) {
            best_obj = obj;
            gj = static_cast<std::ptrdiff_t>(t);
          }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (gi >= 0 && diff > 0.0) {
          const double quad = 2.0 - 2.0 * kval(i, t);
          const double obj = -(diff * diff) / std::max(quad, tau);
          if (obj <= best_obj) {
            best_obj = obj;
            gj = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    violation = gmax + gmax2;
    if (violation < h.tolerance || gi < 0 || gj < 0) break;
    const std::size_t j = static_cast<std::size_t>(gj);

    const double old_i = alpha[i], old_j = alpha[j];
    const double qij = sign[i] * sign[j] * kval(i, j);
    if (sign[i] != sign[j]) {
      const double quad = std::max(2.0 + 2.0 * qij, tau);
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      const double quad = std::max(2.0 - 2.0 * qij, tau);
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    const double si = sign[i] * di, sj = sign[j] * dj;
    const double* ki = kernel.data() + (i % n) * n;
    const double* kj = kernel.data() + (j % n) * n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = ki[t] * si + kj[t] * sj;
      grad[t] += v;
      grad[t + n] -= v;
    }
    if (record_trace) res.objective_trace.push_back(objective());
  }
  if (violation >= 10.0 * h.tolerance) {
    throw NumericalError("SVR did not converge: KKT violation " + std::to_string(violation) + " after " +
                         std::to_string(iter) + " iterations");
  }

  // Bias from free variables, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const double yg = sign[t] * grad[t];
    if (upper(t)) {
      if (sign[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (sign[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);

  res.iterations = iter;
  res.kkt_violation = violation;
  res.dual_objective = objective();
  res.beta.resize(n);
  SvrParams& out = res.params;
  out.dim = train.dim;
  out.gamma = gamma;
  out.cost = c;
  out.epsilon = h.epsilon;
  out.bias = -rho;
  for (std::size_t t = 0; t < n; ++t) {
    res.beta[t] = alpha[t] - alpha[t + n];
    if (res.beta[t] != 0.0) {
      auto r = train.row(t);
      out.support.insert(out.support.end(), r.begin(), r.end());
      out.coef.push_back(res.beta[t]);
    }
  }
  return res;
}

}  // namespace droughtens::learners
