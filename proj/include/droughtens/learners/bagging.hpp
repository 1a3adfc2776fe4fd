#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/core/split.hpp"
#include "droughtens/ensemble/overfit.hpp"
#include "droughtens/eval/metrics.hpp"
#include "droughtens/indices/supervised.hpp"
#include "droughtens/learners/ann.hpp"
#include "droughtens/learners/matrix.hpp"
#include "droughtens/learners/scaler.hpp"
#include "droughtens/learners/svr.hpp"
#include "droughtens/modelspace/formula.hpp"

namespace droughtens::learners {

enum class Technique { Ann, Svr };

inline std::string_view to_string(Technique t) { return t == Technique::Ann ? "ANN" : "SVR"; }

inline Technique parse_technique(std::string_view s) {
  if (s == "ANN" || s == "ann") return Technique::Ann;
  if (s == "SVR" || s == "svr") return Technique::Svr;
  throw ConfigError("unknown technique '" + std::string(s) + "'");
}

struct LearnerConfig {
  AnnHyper ann;
  bool ann_auto_hidden = true;     // hidden = {2 n + 1} per formula
  SvrHyper svr;
  bool svr_scale_target = false;   // epsilon in raw target units unless set
};

// One bagging iteration: its scaler, fitted model and fold metrics.
struct Replicate {
  Scaler scaler;
  std::optional<AnnParams> ann;
  std::optional<SvrParams> svr;
  bool svr_scaled_target = false;
  double train_r2 = 0.0;
  double validation_r2 = 0.0;

  // Prediction in target units for one raw feature row.
  double predict(std::span<const double> raw, std::vector<double>& scratch) const {
    scratch.resize(raw.size());
    scaler.transform_row(raw, scratch);
    if (ann) return scaler.inverse_target(ann->predict(scratch));
    const double f = svr->predict(scratch);
    return svr_scaled_target ? scaler.inverse_target(f) : f;
  }
};

struct BaggedModel {
  std::string formula_id;
  std::string formula;
  Technique technique = Technique::Ann;
  std::vector<std::string> features;
  std::vector<Replicate> replicates;
  double train_r2 = 0.0;        // mean over replicates
  double validation_r2 = 0.0;   // mean over replicates
  double overfit_index = 0.0;   // validation_r2 - train_r2
  std::vector<double> oof;      // per in-sample row: mean validation-fold prediction, NaN if never held out

  std::size_t predictor_count() const { return features.size(); }
};

namespace detail {

inline std::vector<double> predict_rows(const Replicate& rep, Rows raw) {
  std::vector<double> out(raw.size()), scratch;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = rep.predict(raw.row(i), scratch);
  return out;
}

}  // namespace detail

// Trains one replicate on the TRAIN rows; the validation rows drive the
// network's early stopping.
inline Replicate fit_replicate(Technique technique, const RowStore& train, const RowStore& validation,
                               const LearnerConfig& cfg, std::uint64_t seed) {
  Replicate rep;
  rep.scaler = fit_scaler(train.view());
  const auto xs = rep.scaler.transform(train.view());
  const auto xv = rep.scaler.transform(validation.view());
  if (technique == Technique::Ann) {
    AnnHyper h = cfg.ann;
    if (cfg.ann_auto_hidden) h.hidden = default_hidden(train.dim);
    const auto ys = rep.scaler.transform_targets(train.y);
    const auto yv = rep.scaler.transform_targets(validation.y);
    std::optional<Rows> val;
    if (validation.size() > 0) val = Rows{xv, yv, validation.dim};
    rep.ann = train_ann(Rows{xs, ys, train.dim}, val, h, seed).params;
  } else {
    rep.svr_scaled_target = cfg.svr_scale_target;
    const auto ys = cfg.svr_scale_target ? rep.scaler.transform_targets(train.y) : train.y;
    rep.svr = train_svr(Rows{xs, ys, train.dim}, cfg.svr).params;
  }
  rep.train_r2 = eval::r2_or_zero(detail::predict_rows(rep, train.view()), train.y);
  rep.validation_r2 =
      validation.size() >= 3 ? eval::r2_or_zero(detail::predict_rows(rep, validation.view()), validation.y) : 0.0;
  return rep;
}

// K replicates of (formula, technique) on the in-sample rows, each on its own
// 70:30 assignment. Replicate seeds derive from (seed, technique, formula id, repeat).
inline BaggedModel bagged_fit(const modelspace::ModelFormula& formula, Technique technique,
                              const indices::SupervisedDataset& in_sample, const SplitPlan& plan,
                              const LearnerConfig& cfg, std::uint64_t global_seed) {
  plan.validate();
  BaggedModel model;
  model.formula_id = modelspace::formula_id(formula);
  model.formula = formula.str();
  model.technique = technique;
  model.features = formula.predictor_names();
  const auto cols = in_sample.feature_indices(model.features);
  const std::size_t dim = cols.size();

  std::vector<double> oof_sum(in_sample.rows(), 0.0);
  std::vector<int> oof_count(in_sample.rows(), 0);
  for (int r = 0; r < plan.repeats; ++r) {
    const auto labels = assign_train_validation(std::span<const RowKey>(in_sample.keys), plan, r);
    RowStore train{{}, {}, dim}, val{{}, {}, dim};
    std::vector<std::size_t> val_rows;
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < in_sample.rows(); ++i) {
      for (std::size_t j = 0; j < dim; ++j) row[j] = in_sample.feature(i, cols[j]);
      if (labels[i] == SplitLabel::Train) {
        train.push(row, in_sample.target[i]);
      } else {
        val.push(row, in_sample.target[i]);
        val_rows.push_back(i);
      }
    }
    const auto seed = derive_seed(global_seed, to_string(technique), model.formula_id, static_cast<std::uint64_t>(r));
    try {
      model.replicates.push_back(fit_replicate(technique, train, val, cfg, seed));
    } catch (const Error& e) {
      throw NumericalError(std::string(to_string(technique)) + " " + model.formula + " replicate " +
                           std::to_string(r) + ": " + e.what());
    }
    const auto preds = detail::predict_rows(model.replicates.back(), val.view());
    for (std::size_t k = 0; k < val_rows.size(); ++k) {
      oof_sum[val_rows[k]] += preds[k];
      ++oof_count[val_rows[k]];
    }
  }
  for (const auto& rep : model.replicates) {
    model.train_r2 += rep.train_r2 / static_cast<double>(plan.repeats);
    model.validation_r2 += rep.validation_r2 / static_cast<double>(plan.repeats);
  }
  model.overfit_index = ensemble::overfit_index(model.train_r2, model.validation_r2).index;
  model.oof.resize(in_sample.rows());
  for (std::size_t i = 0; i < in_sample.rows(); ++i) {
    model.oof[i] = oof_count[i] ? oof_sum[i] / oof_count[i] : kMissing;
  }
  return model;
}

// Mean over replicates of each replicate's prediction, in target units.
inline std::vector<double> predict(const BaggedModel& model, const indices::SupervisedDataset& rows) {
  if (model.replicates.empty()) throw DataError("bagged model " + model.formula_id + " has no replicates");
  const auto cols = rows.feature_indices(model.features);
  std::vector<double> out(rows.rows(), 0.0), raw(cols.size()), scratch;
  const double k = static_cast<double>(model.replicates.size());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) raw[j] = rows.feature(i, cols[j]);
    double sum = 0.0;
    for (const auto& rep : model.replicates) sum += rep.predict(raw, scratch);
    out[i] = sum / k;
  }
  return out;
}

}  // namespace droughtens::learners
