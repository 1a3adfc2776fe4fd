#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/ensemble/combine.hpp"
#include "droughtens/learners/ann.hpp"

namespace droughtens::ensemble {

struct StackerConfig {
  std::vector<int> hidden;  // empty: linear perceptron
  learners::AnnHyper hyper = default_hyper();
  double train_ratio = 0.7;  // internal early-stopping split of the out-of-fold rows

  static learners::AnnHyper default_hyper() {
    learners::AnnHyper h;
    h.delta0 = 0.01;
    h.max_epochs = 2000;
    h.patience = 50;
    return h;
  }
};

// Meta-model over member predictions. Inputs and target share one affine
// map (the target's range), so a linear stacker starts at the simple mean.
struct Stacker {
  double lo = 0.0;
  double hi = 1.0;
  learners::AnnParams net;
  int best_epoch = 0;

  std::size_t members() const { return net.inputs(); }

  std::vector<double> predict(const MemberPredictions& preds) const {
    const auto n = detail::aligned_rows(preds);
    if (preds.size() != members()) throw DataError("stacker: member count mismatch");
    std::vector<double> out(n), x(preds.size());
    const double w = hi - lo;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t m = 0; m < preds.size(); ++m) x[m] = (preds[m][r] - lo) / w;
      out[r] = lo + w * net.predict(x);
    }
    return out;
  }

  // Member weights of a linear stacker (last entry is the bias in target units).
  std::vector<double> linear_weights() const {
    if (net.layers.size() != 2) return {};
    std::vector<double> w(net.weights.begin(), net.weights.end());
    w.back() *= hi - lo;
    w.back() += lo * (1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0));
    return w;
  }
};

inline Stacker train_stacker(const MemberPredictions& oof, const std::vector<double>& target, std::uint64_t seed,
                             const StackerConfig& cfg = {}) {
  const auto n = detail::aligned_rows(oof);
  if (target.size() != n) throw DataError("stacker: target not aligned with member predictions");
  if (n < 8) throw DataError("stacker needs at least 8 out-of-fold rows");
  if (!(cfg.train_ratio > 0.0 && cfg.train_ratio < 1.0)) throw ConfigError("stacker train_ratio must lie in (0, 1)");
  Stacker s;
  const auto [lo, hi] = std::minmax_element(target.begin(), target.end());
  s.lo = *lo;
  s.hi = *hi > *lo ? *hi : *lo + 1.0;
  const double w = s.hi - s.lo;
  const std::size_t k = oof.size();

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<std::uint64_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = hash_combine(seed, i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
  const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_ratio * static_cast<double>(n) + 1e-9));
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  learners::RowStore train{{}, {}, k}, val{{}, {}, k};
  std::vector<double> x(k);
  for (std::size_t j = 0; j < n; ++j) {
    const auto r = order[j];
    for (std::size_t m = 0; m < k; ++m) x[m] = (oof[m][r] - s.lo) / w;
    (j < n_train ? train : val).push(x, (target[r] - s.lo) / w);
  }

  std::optional<learners::AnnParams> init;
  if (cfg.hidden.empty()) {
    learners::AnnParams p;
    p.layers = {static_cast<int>(k), 1};
    p.weights.assign(k + 1, 1.0 / static_cast<double>(k));
    p.weights.back() = 0.0;
    init = std::move(p);
  }
  auto h = cfg.hyper;
  h.hidden = cfg.hidden;
  const auto res = learners::train_ann(train.view(), val.view(), h, seed, init);
  s.net = res.params;
  s.best_epoch = res.best_epoch;
  return s;
}

}  // namespace droughtens::ensemble
