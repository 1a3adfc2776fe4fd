#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/learners/matrix.hpp"

namespace droughtens::learners {

struct AnnHyper {
  std::vector<int> hidden;  // empty: single-layer linear perceptron
  double delta0 = 0.1;
  double delta_min = 1e-6;
  double delta_max = 50.0;
  double eta_plus = 1.2;
  double eta_minus = 0.5;
  int max_epochs = 2000;
  int patience = 50;        // epochs without validation improvement
  double init_range = 0.5;  // weights start uniform in [-r, r]
};

// Default hidden layout for a formula with n inputs: one layer of 2n + 1.
inline std::vector<int> default_hidden(std::size_t n_inputs) { return {static_cast<int>(2 * n_inputs + 1)}; }

// Feed-forward network, sigmoid hidden units and one linear output. Weights
// are stored layer by layer: W (out x in, row-major) followed by b (out).
struct AnnParams {
  std::vector<int> layers;  // inputs, hidden..., 1
  std::vector<double> weights;

  std::size_t inputs() const { return static_cast<std::size_t>(layers.front()); }

  static std::size_t weight_count(const std::vector<int>& layers) {
    std::size_t n = 0;
    for (std::size_t l = 1; l < layers.size(); ++l) {
      n += static_cast<std::size_t>(layers[l]) * static_cast<std::size_t>(layers[l - 1] + 1);
    }
    return n;
  }

  double predict(std::span<const double> x) const;
};

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Activation buffers for one forward/backward pass.
struct AnnWorkspace {
  std::vector<std::vector<double>> act;    // act[0] = input, act[L-1] = output
  std::vector<std::vector<double>> delta;  // error signals per layer

  explicit AnnWorkspace(const std::vector<int>& layers) {
    for (int n : layers) {
      act.emplace_back(static_cast<std::size_t>(n));
      delta.emplace_back(static_cast<std::size_t>(n));
    }
  }
};

inline double forward(const AnnParams& p, std::span<const double> x, AnnWorkspace& ws) {
  const std::size_t L = p.layers.size();
  std::copy(x.begin(), x.end(), ws.act[0].begin());
  const double* w = p.weights.data();
  for (std::size_t l = 1; l < L; ++l) {
    const auto in = static_cast<std::size_t>(p.layers[l - 1]);
    const auto out = static_cast<std::size_t>(p.layers[l]);
    const double* b = w + out * in;
    const auto& prev = ws.act[l - 1];
    auto& cur = ws.act[l];
    const bool is_output = l + 1 == L;
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += row[i] * prev[i];
      cur[o] = is_output ? z : sigmoid(z);
    }
    w = b + out;
  }
  return ws.act[L - 1][0];
}

}  // namespace detail

inline double AnnParams::predict(std::span<const double> x) const {
  if (x.size() != inputs()) throw DataError("network input dimension mismatch");
  detail::AnnWorkspace ws(layers);
  return detail::forward(*this, x, ws);
}

inline AnnParams init_ann(std::size_t inputs, const std::vector<int>& hidden, std::uint64_t seed, double range) {
  AnnParams p;
  p.layers.push_back(static_cast<int>(inputs));
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden layer sizes must be >= 1");
    p.layers.push_back(h);
  }
  p.layers.push_back(1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  p.weights.resize(AnnParams::weight_count(p.layers));
  for (auto& w : p.weights) w = u(rng);
  return p;
}

// Mean squared error over `rows`.
inline double ann_mse(const AnnParams& p, Rows rows) {
  detail::AnnWorkspace ws(p.layers);
  double se = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double e = detail::forward(p, rows.row(i), ws) - rows.y[i];
    se += e * e;
  }
  return se / static_cast<double>(rows.size());
}

// Batch MSE and its gradient with respect to every weight.
inline double ann_loss_and_gradient(const AnnParams& p, Rows rows, std::vector<double>& grad) {
  const std::size_t L = p.layers.size();
  grad.assign(p.weights.size(), 0.0);
  detail::AnnWorkspace ws(p.layers);
  const double scale = 2.0 / static_cast<double>(rows.size());
  double se = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double err = detail::forward(p, rows.row(r), ws) - rows.y[r];
    se += err * err;
    ws.delta[L - 1][0] = scale * err;
    // Walk layers backwards; `off` points at the start of layer l's block.
    std::size_t off = p.weights.size();
    for (std::size_t l = L - 1; l >= 1; --l) {
      const auto in = static_cast<std::size_t>(p.layers[l - 1]);
      const auto out = static_cast<std::size_t>(p.layers[l]);
      off -= out * (in + 1);
      const double* w = p.weights.data() + off;
      double* gw = grad.data() + off;
      double* gb = gw + out * in;
      const auto& prev = ws.act[l - 1];
      const auto& d = ws.delta[l];
      for (std::size_t o = 0; o < out; ++o) {
        gb[o] += d[o];
        double* grow = gw + o * in;
        for (std::size_t i = 0; i < in; ++i) grow[i] += d[o] * prev[i];
      }
      if (l > 1) {
        auto& dprev = ws.delta[l - 1];
        for (std::size_t i = 0; i < in; ++i) {
          double s = 0.0;
          for (std::size_t o = 0; o < out; ++o) s += w[o * in + i] * d[o];
          dprev[i] = s * prev[i] * (1.0 - prev[i]);
        }
      }
    }
  }
  return se / static_cast<double>(rows.size());
}

// Per-weight adaptive step sizes and the previous gradient signs.
struct RpropState {
  std::vector<double> step;
  std::vector<double> prev_grad;

  RpropState(std::size_t n, double delta0) : step(n, delta0), prev_grad(n, 0.0) {}
};

// One iRPROP- update: the step grows on agreeing signs and shrinks on a sign
// change, in which case the weight is left alone and the stored gradient zeroed.
inline void rprop_update(std::vector<double>& weights, const std::vector<double>& grad, RpropState& st,
                         const AnnHyper& h) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = grad[i];
    const double s = g * st.prev_grad[i];
    if (s > 0.0) {
      st.step[i] = std::min(st.step[i] * h.eta_plus, h.delta_max);
    } else if (s < 0.0) {
      st.step[i] = std::max(st.step[i] * h.eta_minus, h.delta_min);
      st.prev_grad[i] = 0.0;
      continue;
    }
    if (g > 0.0) {
      weights[i] -= st.step[i];
    } else if (g < 0.0) {
      weights[i] += st.step[i];
    }
    st.prev_grad[i] = g;
  }
}

struct AnnTrainResult {
  AnnParams params;      // parameters of the best monitored epoch
  int epochs_run = 0;
  int best_epoch = 0;
  double train_mse = 0.0;
  double monitor_mse = 0.0;  // validation MSE, or train MSE without a validation fold
};

// Full-batch iRPROP- on MSE with early stopping on `validation` (or on the
// training loss when no validation rows are given). Deterministic in `seed`.
inline AnnTrainResult train_ann(Rows train, std::optional<Rows> validation, const AnnHyper& h, std::uint64_t seed,
                                std::optional<AnnParams> initial = std::nullopt) {
  if (train.size() == 0) throw DataError("cannot train a network on an empty fold");
  if (validation && validation->size() == 0) validation.reset();
  for (double v : train.x) {
    if (!std::isfinite(v)) throw DataError("non-finite network input");
  }
  AnnParams p = initial ? *initial : init_ann(train.dim, h.hidden, seed, h.init_range);
  if (p.inputs() != train.dim) throw DataError("initial network does not match the input dimension");

  RpropState state(p.weights.size(), h.delta0);
  std::vector<double> grad;
  AnnTrainResult res;
  res.params = p;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 0;; ++epoch) {
    const double train_mse = ann_loss_and_gradient(p, train, grad);
    const double monitor = validation ? ann_mse(p, *validation) : train_mse;
    if (!std::isfinite(train_mse) || !std::isfinite(monitor)) {
      throw NumericalError("network loss became non-finite at epoch " + std::to_string(epoch));
    }
    if (monitor < best) {
      best = monitor;
      since_best = 0;
      res.params = p;
      res.best_epoch = epoch;
      res.train_mse = train_mse;
      res.monitor_mse = monitor;
    } else if (++since_best >= h.patience) {
      res.epochs_run = epoch;
      break;
    }
    if (epoch >= h.max_epochs) {
      res.epochs_run = epoch;
      break;
    }
    rprop_update(p.weights, grad, state, h);
  }
  return res;
}

}  // namespace droughtens::learners
