#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/core/parallel.hpp"
#include "droughtens/ensemble/combine.hpp"
#include "droughtens/ensemble/stacker.hpp"
#include "droughtens/learners/bagging.hpp"
#include "droughtens/learners/persistence.hpp"

namespace droughtens::ensemble {

using learners::Technique;

enum class Combiner { Simple, Weighted, Stacked };

inline std::string_view to_string(Combiner c) {
  switch (c) {
    case Combiner::Simple: return "SIMPLE";
    case Combiner::Weighted: return "WEIGHTED";
    case Combiner::Stacked: return "STACKED";
  }
  return "?";
}

inline Combiner parse_combiner(std::string_view s) {
  if (s == "SIMPLE" || s == "simple") return Combiner::Simple;
  if (s == "WEIGHTED" || s == "weighted") return Combiner::Weighted;
  if (s == "STACKED" || s == "stacked") return Combiner::Stacked;
  throw ConfigError("unknown combiner '" + std::string(s) + "'");
}

// Lookup of bagged models by (formula id, technique).
class ModelRegistry {
 public:
  ModelRegistry() = default;
  explicit ModelRegistry(const std::vector<learners::BaggedModel>& models) {
    for (const auto& m : models) add(m);
  }
  void add(const learners::BaggedModel& m) {
    if (!index_.emplace(std::make_pair(m.formula_id, m.technique), &m).second) {
      throw DataError("duplicate model " + m.formula_id + "." + std::string(learners::to_string(m.technique)));
    }
  }
  const learners::BaggedModel& at(const std::string& id, Technique t) const {
    auto it = index_.find({id, t});
    if (it == index_.end()) {
      throw DataError("model " + id + "." + std::string(learners::to_string(t)) + " missing from registry");
    }
    return *it->second;
  }
  bool contains(const std::string& id, Technique t) const { return index_.count({id, t}) != 0; }

 private:
  std::map<std::pair<std::string, Technique>, const learners::BaggedModel*> index_;
};

struct EnsembleSpec {
  std::string name;
  std::vector<std::string> formula_ids;  // descending reference validation R²
  std::vector<Technique> techniques;
  Combiner combiner = Combiner::Simple;
  std::vector<double> weights;           // WEIGHTED, one per member
  std::optional<Stacker> stacker;        // STACKED

  // Members are formula-major: each formula under every technique in order.
  std::vector<std::pair<std::string, Technique>> members() const {
    std::vector<std::pair<std::string, Technique>> out;
    for (const auto& id : formula_ids) {
      for (auto t : techniques) out.emplace_back(id, t);
    }
    return out;
  }
  bool heterogenous() const { return techniques.size() > 1; }
};

inline std::string techniques_label(const std::vector<Technique>& ts) {
  if (ts.size() > 1) return "heterogenous";
  return "homogenous-" + std::string(learners::to_string(ts.front()));
}

inline MemberPredictions gather_predictions(const EnsembleSpec& spec, const ModelRegistry& registry,
                                            const indices::SupervisedDataset& rows, unsigned threads = 1) {
  const auto members = spec.members();
  MemberPredictions preds(members.size());
  std::vector<const learners::BaggedModel*> models;
  for (const auto& [id, t] : members) models.push_back(&registry.at(id, t));
  parallel_for(members.size(), threads, [&](std::size_t i) { preds[i] = learners::predict(*models[i], rows); });
  return preds;
}

inline std::vector<double> combine(const EnsembleSpec& spec, const MemberPredictions& preds) {
  switch (spec.combiner) {
    case Combiner::Simple: return combine_simple(preds);
    case Combiner::Weighted: return combine_with_weights(preds, spec.weights);
    case Combiner::Stacked:
      if (!spec.stacker) throw DataError("ensemble " + spec.name + " has no trained stacker");
      return spec.stacker->predict(preds);
  }
  throw DataError("unknown combiner");
}

inline std::vector<double> predict_ensemble(const EnsembleSpec& spec, const ModelRegistry& registry,
                                            const indices::SupervisedDataset& rows, unsigned threads = 1) {
  return combine(spec, gather_predictions(spec, registry, rows, threads));
}

// Out-of-fold member predictions restricted to rows every member has seen in
// a validation fold. Returns (predictions, target, in-sample row indices).
struct OofMatrix {
  MemberPredictions preds;
  std::vector<double> target;
  std::vector<std::size_t> rows;
};

inline OofMatrix out_of_fold(const std::vector<const learners::BaggedModel*>& models,
                             const std::vector<double>& in_sample_target) {
  OofMatrix out;
  for (std::size_t r = 0; r < in_sample_target.size(); ++r) {
    bool complete = true;
    for (const auto* m : models) {
      if (m->oof.size() != in_sample_target.size()) throw DataError("model " + m->formula_id + ": out-of-fold rows misaligned");
      if (!std::isfinite(m->oof[r])) complete = false;
    }
    if (complete) out.rows.push_back(r);
  }
  out.preds.resize(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (auto r : out.rows) out.preds[i].push_back(models[i]->oof[r]);
  }
  for (auto r : out.rows) out.target.push_back(in_sample_target[r]);
  return out;
}

// Fits the combiner of one ensemble from in-sample information only.
inline EnsembleSpec build_ensemble(const std::vector<std::string>& formula_ids, std::vector<Technique> techniques,
                                   Combiner combiner, const ModelRegistry& registry,
                                   const std::vector<double>& in_sample_target, std::uint64_t seed,
                                   const StackerConfig& stacker_cfg = {}) {
  if (formula_ids.empty()) throw DataError("ensemble needs at least one formula");
  EnsembleSpec spec;
  spec.formula_ids = formula_ids;
  spec.techniques = std::move(techniques);
  spec.combiner = combiner;
  spec.name = std::string(to_string(combiner)) + "/" + techniques_label(spec.techniques);
  std::vector<const learners::BaggedModel*> models;
  for (const auto& [id, t] : spec.members()) models.push_back(&registry.at(id, t));
  if (combiner == Combiner::Weighted) {
    std::vector<double> scores;
    for (const auto* m : models) scores.push_back(m->validation_r2);
    spec.weights = minmax_weights(scores);
  } else if (combiner == Combiner::Stacked) {
    const auto oof = out_of_fold(models, in_sample_target);
    spec.stacker = train_stacker(oof.preds, oof.target, derive_seed(seed, "stacker", spec.name, 0), stacker_cfg);
  }
  return spec;
}

inline void write_ensemble(const EnsembleSpec& s, std::ostream& out) {
  using learners::detail::num;
  out << "droughtens-ensemble 1\n";
  out << "name " << s.name << '\n';
  out << "combiner " << to_string(s.combiner) << '\n';
  out << "techniques " << s.techniques.size();
  for (auto t : s.techniques) out << ' ' << learners::to_string(t);
  out << '\n';
  learners::detail::put_list(out, "formulas", s.formula_ids);
  learners::detail::put_list(out, "weights", s.weights);
  if (s.stacker) {
    out << "stacker " << num(s.stacker->lo) << ' ' << num(s.stacker->hi) << ' ' << s.stacker->best_epoch << '\n';
    learners::detail::put_list(out, "stacker_layers", s.stacker->net.layers);
    learners::detail::put_list(out, "stacker_weights", s.stacker->net.weights);
  } else {
    out << "stacker none\n";
  }
  out << "end\n";
}

inline EnsembleSpec read_ensemble(std::istream& in) {
  learners::detail::TokenReader t(in);
  t.expect("droughtens-ensemble");
  if (t.count() != 1) throw DataError("unsupported ensemble manifest version");
  EnsembleSpec s;
  t.expect("name");
  s.name = t.word();
  t.expect("combiner");
  s.combiner = parse_combiner(t.word());
  for (const auto& w : t.words("techniques")) s.techniques.push_back(learners::parse_technique(w));
  s.formula_ids = t.words("formulas");
  s.weights = t.numbers("weights");
  t.expect("stacker");
  const auto first = t.word();
  if (first != "none") {
    Stacker st;
    if (!text::parse_double(first, st.lo)) throw DataError("ensemble manifest: bad stacker range");
    st.hi = t.number();
    st.best_epoch = static_cast<int>(t.count());
    for (double v : t.numbers("stacker_layers")) st.net.layers.push_back(static_cast<int>(v));
    st.net.weights = t.numbers("stacker_weights");
    if (st.net.weights.size() != learners::AnnParams::weight_count(st.net.layers)) {
      throw DataError("ensemble manifest: stacker weights do not match layers");
    }
    s.stacker = std::move(st);
  }
  t.expect("end");
  if (s.techniques.empty() || s.formula_ids.empty()) throw DataError("ensemble manifest has no members");
  if (s.combiner == Combiner::Weighted && s.weights.size() != s.formula_ids.size() * s.techniques.size()) {
    throw DataError("ensemble manifest: weight count does not match members");
  }
  return s;
}

}  // namespace droughtens::ensemble
