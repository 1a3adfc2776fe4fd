#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/text.hpp"
#include "droughtens/eval/metrics.hpp"

namespace droughtens::ensemble {

struct SelectionStep {
  std::string phase;   // start | backward | forward | final
  std::string action;  // what was tried
  std::size_t members = 0;
  double r2 = 0.0;
  bool accepted = false;
};

struct SelectionResult {
  std::vector<std::size_t> members;  // indices into the ranked pool, ascending rank
  double r2 = 0.0;
  std::vector<SelectionStep> log;
};

namespace detail {

// R² of the simple average of the given pool members.
inline double average_r2(const std::vector<std::vector<double>>& preds, const std::vector<double>& target,
                         const std::vector<std::size_t>& members) {
  std::vector<double> avg(target.size(), 0.0);
  for (std::size_t m : members) {
    for (std::size_t r = 0; r < target.size(); ++r) avg[r] += preds[m][r];
  }
  for (auto& v : avg) v /= static_cast<double>(members.size());
  return eval::r2_or_zero(avg, target);
}

// Rounding in the running mean can move R² of a tied set by a few ulps.
inline constexpr double kTieSlack = 1e-12;

inline bool not_worse(double candidate, double reference) { return candidate >= reference - kTieSlack; }

}  // namespace detail

// Backward-forward membership search over a pool ranked best first.
//
// Backward: drop the lowest-ranked `batch` members while the simple-average
// R² stays at or above the running best and more than `batch` remain.
// Forward: after a rejected drop, restore that batch one model at a time in
// rank order, keeping a model when R² does not decrease. If the forward
// result scores below the best backward set, the backward set is returned.
inline SelectionResult select_members(const std::vector<std::vector<double>>& ranked_preds,
                                      const std::vector<double>& target, std::size_t batch = 5) {
  if (ranked_preds.empty()) throw DataError("member selection: empty pool");
  if (batch == 0) throw ConfigError("member selection batch must be >= 1");
  for (const auto& p : ranked_preds) {
    if (p.size() != target.size()) throw DataError("member selection: prediction rows misaligned with target");
  }
  SelectionResult res;
  std::vector<std::size_t> current(ranked_preds.size());
  for (std::size_t i = 0; i < current.size(); ++i) current[i] = i;
  double best = detail::average_r2(ranked_preds, target, current);
  res.log.push_back({"start", "all", current.size(), best, true});

  std::vector<std::size_t> removed;
  bool rejected = false;
  while (current.size() > batch) {
    std::vector<std::size_t> trial(current.begin(), current.end() - static_cast<std::ptrdiff_t>(batch));
    const double r2 = detail::average_r2(ranked_preds, target, trial);
    removed.assign(current.end() - static_cast<std::ptrdiff_t>(batch), current.end());
    const bool ok = detail::not_worse(r2, best);
    res.log.push_back({"backward", "drop " + std::to_string(batch), trial.size(), r2, ok});
    if (!ok) {
      rejected = true;
      break;
    }
    best = r2;
    current = std::move(trial);
  }

  if (rejected) {
    std::vector<std::size_t> fwd(current.begin(), current.end() - static_cast<std::ptrdiff_t>(batch));
    double r2 = detail::average_r2(ranked_preds, target, fwd);
    for (std::size_t m : removed) {
      auto trial = fwd;
      trial.push_back(m);
      const double t = detail::average_r2(ranked_preds, target, trial);
      const bool ok = detail::not_worse(t, r2);
      res.log.push_back({"forward", "add " + std::to_string(m), trial.size(), t, ok});
      if (ok) {
        fwd = std::move(trial);
        r2 = t;
      }
    }
    if (detail::not_worse(r2, best)) {
      current = std::move(fwd);
      best = r2;
    }
  }
  res.members = current;
  res.r2 = best;
  res.log.push_back({"final", "members", current.size(), best, true});
  return res;
}

inline void write_selection_log(const SelectionResult& s, const std::vector<std::string>& pool_ids,
                                std::ostream& out) {
  out << "# backward: drop lowest-ranked batch while R2 >= running best; forward: re-add rejected batch in rank "
         "order, keep when R2 does not decrease\n";
  out << "step,phase,action,members,r2,accepted\n";
  for (std::size_t i = 0; i < s.log.size(); ++i) {
    const auto& st = s.log[i];
    std::string action = st.action;
    if (st.phase == "forward") {
      const auto idx = std::stoul(action.substr(4));
      action = "add " + (idx < pool_ids.size() ? pool_ids[idx] : action.substr(4));
    }
    out << i << ',' << st.phase << ',' << action << ',' << st.members << ',' << text::format_double(st.r2) << ','
        << (st.accepted ? "yes" : "no") << '\n';
  }
}

}  // namespace droughtens::ensemble
