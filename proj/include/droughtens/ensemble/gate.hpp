#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/text.hpp"
#include "droughtens/ensemble/overfit.hpp"
#include "droughtens/learners/bagging.hpp"

namespace droughtens::ensemble {

struct GateConfig {
  double r2_min = 0.7;
  double overfit_tolerance = kDefaultOverfitTolerance;
  learners::Technique reference = learners::Technique::Ann;

  void validate() const {
    if (!(r2_min > 0.0 && r2_min < 1.0)) throw ConfigError("gate r2_min must lie in (0, 1)");
    if (!(overfit_tolerance >= 0.0)) throw ConfigError("gate overfit_tolerance must be >= 0");
  }
};

struct GateDecision {
  std::string formula_id;
  std::string formula;
  double train_r2 = 0.0;
  double validation_r2 = 0.0;
  bool kept = false;
  std::string reason;  // "kept", "below_r2_min", "overfit"
};

struct GateResult {
  std::vector<std::string> survivors;  // formula ids, descending reference validation R²
  std::vector<GateDecision> decisions; // one per reference model, input order
  std::size_t dropped_below = 0;
  std::size_t dropped_overfit = 0;
};

// Single-model verdict; the cutoff is checked before the overfit rule.
inline GateDecision gate_one(const learners::BaggedModel& m, const GateConfig& cfg) {
  GateDecision d{m.formula_id, m.formula, m.train_r2, m.validation_r2, false, ""};
  if (!(m.validation_r2 >= cfg.r2_min)) d.reason = "below_r2_min";
  else if (overfit_index(m.train_r2, m.validation_r2, cfg.overfit_tolerance).is_overfit) d.reason = "overfit";
  else {
    d.kept = true;
    d.reason = "kept";
  }
  return d;
}

// Formulas ranked by descending validation R²; ties go to fewer predictors,
// then to position in `models`.
inline std::vector<std::size_t> rank_models(const std::vector<const learners::BaggedModel*>& models) {
  std::vector<std::size_t> order(models.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (models[a]->validation_r2 != models[b]->validation_r2) return models[a]->validation_r2 > models[b]->validation_r2;
    return models[a]->predictor_count() < models[b]->predictor_count();
  });
  return order;
}

// Gates on the reference technique's bagged metrics. A surviving formula
// admits its models of every technique.
inline GateResult gate_models(const std::vector<learners::BaggedModel>& models, const GateConfig& cfg) {
  cfg.validate();
  GateResult out;
  std::vector<const learners::BaggedModel*> kept;
  for (const auto& m : models) {
    if (m.technique != cfg.reference) continue;
    auto d = gate_one(m, cfg);
    if (d.reason == "below_r2_min") ++out.dropped_below;
    if (d.reason == "overfit") ++out.dropped_overfit;
    if (d.kept) kept.push_back(&m);
    out.decisions.push_back(std::move(d));
  }
  if (out.decisions.empty()) {
    throw DataError("gate: no " + std::string(learners::to_string(cfg.reference)) + " models to gate");
  }
  if (kept.empty()) {
    throw DataError("gate: no formula reached validation R² >= " + text::format_double(cfg.r2_min) +
                    " without overfitting");
  }
  for (std::size_t i : rank_models(kept)) out.survivors.push_back(kept[i]->formula_id);
  return out;
}

inline void write_gate(const GateResult& g, std::ostream& out) {
  out << "formula_id,train_r2,validation_r2,decision,formula\n";
  for (const auto& d : g.decisions) {
    out << d.formula_id << ',' << text::format_double(d.train_r2) << ',' << text::format_double(d.validation_r2)
        << ',' << d.reason << ',' << d.formula << '\n';
  }
}

}  // namespace droughtens::ensemble
