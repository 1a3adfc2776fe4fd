#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/core/parallel.hpp"
#include "droughtens/core/split.hpp"
#include "droughtens/core/synthetic.hpp"
#include "droughtens/core/table.hpp"
#include "droughtens/ensemble/ensemble.hpp"
#include "droughtens/ensemble/gate.hpp"
#include "droughtens/ensemble/select.hpp"
#include "droughtens/eval/report.hpp"
#include "droughtens/indices/supervised.hpp"
#include "droughtens/indices/variables.hpp"
#include "droughtens/learners/grid_search.hpp"
#include "droughtens/learners/persistence.hpp"
#include "droughtens/modelspace/enumerate.hpp"
#include "droughtens/pipeline/config.hpp"
#include "droughtens/varselect/source_decision.hpp"

namespace droughtens::pipeline {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string() + " (has the producing stage run?)");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const fs::path& p, std::string_view body) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << body;
}

// Hash of every regular file under the given paths (relative to root), in
// sorted order, names included.
inline std::string hash_paths(const fs::path& root, const std::vector<std::string>& rel) {
  ContentHash h;
  for (const auto& r : rel) {
    const auto p = root / r;
    std::vector<fs::path> files;
    if (fs::is_directory(p)) {
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      h.update("missing:" + r);
      continue;
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      h.update(fs::relative(f, root).generic_string());
      h.update(read_file(f));
    }
  }
  return h.hex();
}

struct StageContext {
  RunConfig config;
  fs::path out;
};

namespace stage_files {
inline constexpr const char* raw = "data/raw.csv";
inline constexpr const char* supervised_in = "indices/supervised_in.csv";
inline constexpr const char* supervised_out = "indices/supervised_out.csv";
inline constexpr const char* source = "select/source.txt";
inline constexpr const char* source_decision = "select/source_decision.csv";
inline constexpr const char* formulas = "formulas/formulas.txt";
inline constexpr const char* models = "models";
inline constexpr const char* gate_decisions = "gate/decisions.csv";
inline constexpr const char* gate_funnel = "gate/funnel.csv";
inline constexpr const char* survivors = "gate/survivors.txt";
inline constexpr const char* members = "prune/members.txt";
inline constexpr const char* audit = "prune/selection_audit.csv";
inline constexpr const char* ensembles = "ensemble";
inline constexpr const char* predictions = "evaluate/predictions.csv";
}  // namespace stage_files

// ---- shared loaders ----

inline indices::SupervisedDataset load_supervised(const StageContext& c, const char* rel) {
  std::istringstream in(read_file(c.out / rel));
  return indices::read_supervised(in);
}

inline indices::Source load_source(const StageContext& c) {
  return indices::parse_source(std::string(text::trim(read_file(c.out / stage_files::source))));
}

inline std::vector<modelspace::ModelFormula> load_formulas(const StageContext& c) {
  std::istringstream in(read_file(c.out / stage_files::formulas));
  return modelspace::read_formulas(in, indices::modeling_catalog(load_source(c)));
}

inline std::vector<std::string> read_lines(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline std::string lines(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += x + '\n';
  return s;
}

inline indices::VariableCatalog catalog_for(const TimeSeriesTable& raw) {
  indices::BaseColumns base;
  return raw.has_column(base.chirps_rain) ? indices::full_catalog(base)
                                          : indices::modeling_catalog(indices::Source::Tamsat, base);
}

// ---- stages ----

inline void stage_data(const StageContext& c) {
  const auto& input = c.config.get("data.input");
  TimeSeriesTable raw;
  if (input.empty()) {
    raw = generate_synthetic(c.config.synthetic());
  } else {
    TableSchema schema;
    schema.interpolate_short_gaps = c.config.flag("data.interpolate_short_gaps");
    raw = load_table(read_file(input), schema);
  }
  c.config.split().validate(raw);
  write_file(c.out / stage_files::raw, emit_table(raw));
}

// Extremes and distributions are fitted on in-sample months only; the
// supervised rows are then partitioned by target month.
inline void stage_indices(const StageContext& c) {
  const auto raw = load_table(read_file(c.out / stage_files::raw));
  const auto plan = c.config.split();
  const auto io = split_in_out(raw, plan);
  const auto catalog = catalog_for(raw);
  const auto fits = indices::fit_variable_transforms(io.in_sample, catalog, c.config.index_options());
  const auto vars = indices::build_variable_set(raw, catalog, fits);
  const auto sup = indices::build_supervised(vars, catalog.names(), c.config.lead());
  const auto part = indices::partition_by_target(sup, io.out_sample);
  if (part.in_sample.rows() == 0 || part.out_sample.rows() == 0) throw DataError("empty in-sample or out-of-sample set");
  std::ostringstream in_rows, out_rows, lineage;
  indices::write_supervised(part.in_sample, in_rows);
  indices::write_supervised(part.out_sample, out_rows);
  lineage << "variable,lineage\n";
  for (const auto& [name, lin] : indices::resolve_lineage(raw, catalog)) lineage << name << ',' << lin << '\n';
  write_file(c.out / stage_files::supervised_in, in_rows.str());
  write_file(c.out / stage_files::supervised_out, out_rows.str());
  write_file(c.out / "indices/lineage.csv", lineage.str());
}

inline void stage_select_vars(const StageContext& c) {
  const auto d = load_supervised(c, stage_files::supervised_in);
  const auto& requested = c.config.get("select.source");
  std::string chosen;
  const bool both = std::find(d.feature_names.begin(), d.feature_names.end(),
                              indices::precipitation_name(indices::Source::Chirps, "RFE1M")) != d.feature_names.end();
  std::string evidence;
  if (both) {
    const auto decision =
        varselect::compare_sources(d, indices::Source::Tamsat, indices::Source::Chirps, c.config.number("select.alpha"));
    std::ostringstream out;
    varselect::write_source_decision(decision, out);
    evidence = out.str();
    chosen = decision.chosen;
  } else {
    evidence = "# single rainfall source available\n#chosen,TAMSAT,tie=0\n";
    chosen = "TAMSAT";
  }
  if (requested != "auto") {
    chosen = std::string(indices::to_string(indices::parse_source(requested)));
    if (!both && chosen != "TAMSAT") throw DataError("rainfall source " + chosen + " is not in the input");
    evidence += "#override," + chosen + '\n';
  }
  write_file(c.out / stage_files::source_decision, evidence);
  write_file(c.out / stage_files::source, chosen + '\n');
}

inline void stage_enumerate(const StageContext& c) {
  const auto catalog = indices::modeling_catalog(load_source(c));
  const auto formulas = modelspace::enumerate_constrained(catalog, indices::kTargetVariable, c.config.lead());
  std::ostringstream f;
  modelspace::write_formulas(formulas, f);
  write_file(c.out / stage_files::formulas, f.str());
  const auto counts = modelspace::count_unconstrained(static_cast<unsigned>(catalog.size()));
  std::ostringstream k;
  k << "predictors,unconstrained,constrained\n";
  std::vector<std::uint64_t> constrained(counts.per_length.size(), 0);
  for (const auto& m : formulas) ++constrained[m.predictors.size()];
  for (std::size_t len = 1; len < counts.per_length.size(); ++len) {
    k << len << ',' << counts.per_length[len] << ',' << constrained[len] << '\n';
  }
  k << "total," << counts.total << ',' << formulas.size() << '\n';
  write_file(c.out / "formulas/counts.csv", k.str());
}

inline void stage_train(const StageContext& c) {
  const auto d = load_supervised(c, stage_files::supervised_in);
  const auto formulas = load_formulas(c);
  const auto plan = c.config.split();
  const auto techniques = c.config.techniques();
  auto learner = c.config.learner();
  const auto seed = c.config.seed();
  const auto threads = c.config.threads();

  std::optional<double> grid_gamma_factor;
  if (c.config.flag("learners.svr_grid_search") &&
      std::find(techniques.begin(), techniques.end(), learners::Technique::Svr) != techniques.end()) {
    std::vector<modelspace::ModelFormula> singletons;
    for (const auto& f : formulas) {
      if (f.predictors.size() == 1 && f.predictors.front().category == indices::Category::Vegetation) {
        singletons.push_back(f);
      }
    }
    const auto grid = learners::default_svr_grid();
    const auto res = learners::grid_search_svr(d, singletons, grid, plan, learner, seed, threads);
    std::ostringstream g;
    g << "cost,epsilon,gamma_factor,mean_validation_r2,chosen\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      g << text::format_double(grid[i].cost) << ',' << text::format_double(grid[i].epsilon) << ','
        << text::format_double(grid[i].gamma_factor) << ',' << text::format_double(res.scores[i]) << ','
        << (grid[i] == res.best ? 1 : 0) << '\n';
    }
    write_file(c.out / "models/svr_grid.csv", g.str());
    learner.svr.cost = res.best.cost;
    learner.svr.epsilon = res.best.epsilon;
    grid_gamma_factor = res.best.gamma_factor;
  }

  const std::size_t nt = techniques.size();
  std::vector<learners::BaggedModel> models(formulas.size() * nt);
  parallel_for(models.size(), threads, [&](std::size_t i) {
    const auto& f = formulas[i / nt];
    auto cfg = learner;
    if (grid_gamma_factor) cfg.svr.gamma = *grid_gamma_factor / static_cast<double>(f.predictors.size());
    models[i] = learners::bagged_fit(f, techniques[i % nt], d, plan, cfg, seed);
  });
  learners::save_models(models, c.out / stage_files::models);
}

inline std::vector<learners::BaggedModel> load_registry(const StageContext& c) {
  return learners::load_models(c.out / stage_files::models);
}

inline void stage_gate(const StageContext& c) {
  const auto models = load_registry(c);
  const auto g = ensemble::gate_models(models, c.config.gate());
  std::ostringstream dec;
  ensemble::write_gate(g, dec);
  write_file(c.out / stage_files::gate_decisions, dec.str());
  write_file(c.out / stage_files::survivors, lines(g.survivors));
  std::ostringstream funnel;
  funnel << "stage,count\n"
         << "formulas," << g.decisions.size() << '\n'
         << "dropped_below_r2_min," << g.dropped_below << '\n'
         << "dropped_overfit," << g.dropped_overfit << '\n'
         << "survivors," << g.survivors.size() << '\n';
  write_file(c.out / stage_files::gate_funnel, funnel.str());
}

inline void stage_prune(const StageContext& c) {
  const auto models = load_registry(c);
  const ensemble::ModelRegistry registry(models);
  const auto survivors = read_lines(c.out / stage_files::survivors);
  const auto d = load_supervised(c, stage_files::supervised_in);
  const auto reference = c.config.gate().reference;
  std::vector<const learners::BaggedModel*> pool;
  for (const auto& id : survivors) pool.push_back(&registry.at(id, reference));
  const auto oof = ensemble::out_of_fold(pool, d.target);
  const auto sel = ensemble::select_members(oof.preds, oof.target, c.config.batch());
  std::vector<std::string> members;
  for (auto i : sel.members) members.push_back(survivors[i]);
  std::ostringstream audit;
  ensemble::write_selection_log(sel, survivors, audit);
  write_file(c.out / stage_files::audit, audit.str());
  write_file(c.out / stage_files::members, lines(members));
}

inline std::string ensemble_file_name(const std::string& name) {
  std::string f = name;
  std::replace(f.begin(), f.end(), '/', '_');
  return f + ".ensemble";
}

// Technique sets: each technique alone, then all together when there are several.
inline std::vector<std::vector<learners::Technique>> compositions(const std::vector<learners::Technique>& ts) {
  std::vector<std::vector<learners::Technique>> out;
  for (auto t : ts) out.push_back({t});
  if (ts.size() > 1) out.push_back(ts);
  return out;
}

inline void stage_ensemble(const StageContext& c) {
  const auto models = load_registry(c);
  const ensemble::ModelRegistry registry(models);
  const auto members = read_lines(c.out / stage_files::members);
  const auto d = load_supervised(c, stage_files::supervised_in);
  const auto stacker = c.config.stacker();
  std::vector<std::string> names;
  for (auto comb : c.config.combiners()) {
    for (const auto& ts : compositions(c.config.techniques())) {
      const auto spec = ensemble::build_ensemble(members, ts, comb, registry, d.target, c.config.seed(), stacker);
      std::ostringstream out;
      ensemble::write_ensemble(spec, out);
      write_file(c.out / stage_files::ensembles / ensemble_file_name(spec.name), out.str());
      names.push_back(ensemble_file_name(spec.name));
    }
  }
  write_file(c.out / stage_files::ensembles / "index.txt", lines(names));
}

// Champion per technique: best validation R², then fewer predictors, then
// enumeration order.
inline const learners::BaggedModel& champion(const std::vector<learners::BaggedModel>& models, learners::Technique t) {
  std::vector<const learners::BaggedModel*> pool;
  for (const auto& m : models) {
    if (m.technique == t) pool.push_back(&m);
  }
  if (pool.empty()) throw DataError("no " + std::string(learners::to_string(t)) + " models for a champion");
  return *pool[ensemble::rank_models(pool).front()];
}

inline void stage_evaluate(const StageContext& c) {
  const auto models = load_registry(c);
  const ensemble::ModelRegistry registry(models);
  const auto out_rows = load_supervised(c, stage_files::supervised_out);
  const auto threads = c.config.threads();
  std::vector<eval::ApproachPrediction> approaches;
  std::ostringstream champs;
  champs << "technique,formula_id,validation_r2,formula\n";
  for (auto t : c.config.techniques()) {
    const auto& m = champion(models, t);
    champs << learners::to_string(t) << ',' << m.formula_id << ',' << text::format_double(m.validation_r2) << ','
           << m.formula << '\n';
    approaches.push_back({"champion/" + std::string(learners::to_string(t)), learners::predict(m, out_rows)});
  }
  for (const auto& file : read_lines(c.out / stage_files::ensembles / "index.txt")) {
    std::istringstream in(read_file(c.out / stage_files::ensembles / file));
    const auto spec = ensemble::read_ensemble(in);
    approaches.push_back({spec.name, ensemble::predict_ensemble(spec, registry, out_rows, threads)});
  }
  std::ostringstream p;
  p << "unit,target_date,actual";
  for (const auto& a : approaches) p << ',' << a.name;
  p << '\n';
  for (std::size_t r = 0; r < out_rows.rows(); ++r) {
    p << out_rows.keys[r].unit << ',' << out_rows.target_months[r].str() << ','
      << text::format_double(out_rows.target[r]);
    for (const auto& a : approaches) p << ',' << text::format_double(a.predicted[r]);
    p << '\n';
  }
  write_file(c.out / stage_files::predictions, p.str());
  write_file(c.out / "evaluate/champions.csv", champs.str());
}

struct PredictionTable {
  eval::EvaluationRows rows;
  std::vector<eval::ApproachPrediction> approaches;
};

inline PredictionTable read_predictions(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty predictions file");
  const auto header = text::split(line, ',');
  if (header.size() < 4 || header[0] != "unit" || header[1] != "target_date" || header[2] != "actual") {
    throw DataError("malformed predictions header");
  }
  PredictionTable t;
  for (std::size_t i = 3; i < header.size(); ++i) t.approaches.push_back({std::string(header[i]), {}});
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto cells = text::split(line, ',');
    if (cells.size() != header.size()) throw DataError("predictions row has wrong cell count");
    t.rows.keys.push_back({std::string(cells[0]), YearMonth::parse(cells[1])});
    double v = 0.0;
    if (!text::parse_double(cells[2], v)) throw DataError("non-numeric actual value");
    t.rows.actual.push_back(v);
    for (std::size_t i = 3; i < cells.size(); ++i) {
      if (!text::parse_double(cells[i], v)) throw DataError("non-numeric prediction");
      t.approaches[i - 3].predicted.push_back(v);
    }
  }
  return t;
}

inline void stage_report(const StageContext& c) {
  const auto t = read_predictions(c.out / stage_files::predictions);
  const auto ev = eval::evaluate_approaches(t.rows, t.approaches);
  auto files = eval::render_report(t.rows, t.approaches, ev);
  files["selection_audit.csv"] = read_file(c.out / stage_files::audit);
  files["gate_funnel.csv"] = read_file(c.out / stage_files::gate_funnel);
  files["gate_decisions.csv"] = read_file(c.out / stage_files::gate_decisions);
  files["source_decision.csv"] = read_file(c.out / stage_files::source_decision);
  files["champions.csv"] = read_file(c.out / "evaluate/champions.csv");
  files["config.ini"] = c.config.serialize(false);

  const auto input_hash = hash_paths(c.out, {stage_files::raw});
  ContentHash run_id;
  run_id.update(c.config.digest());
  run_id.update(input_hash);
  std::ostringstream m;
  m << "format = droughtens-run 1\n"
    << "seed = " << c.config.seed() << '\n'
    << "config_digest = " << c.config.digest() << '\n'
    << "input_hash = " << input_hash << '\n'
    << "run_id = " << run_id.hex() << '\n'
    << "formulas = " << read_lines(c.out / stage_files::formulas).size() << '\n'
    << "gate_survivors = " << read_lines(c.out / stage_files::survivors).size() << '\n'
    << "ensemble_members = " << read_lines(c.out / stage_files::members).size() << '\n'
    << "approaches = " << t.approaches.size() << '\n'
    << "out_of_sample_rows = " << t.rows.keys.size() << '\n'
    << "blank_cells = " << ev.warnings.size() << '\n';
  files["manifest.txt"] = m.str();
  const auto dir = c.out / "report";
  eval::write_files(dir, files);
}

struct StageSpec {
  std::string name;
  std::vector<std::string> inputs;   // relative paths read
  std::vector<std::string> outputs;  // relative directories owned by the stage
  std::function<void(const StageContext&)> run;
};

inline const std::vector<StageSpec>& stage_table() {
  namespace f = stage_files;
  static const std::vector<StageSpec> stages = {
      {"data", {}, {"data"}, stage_data},
      {"indices", {f::raw}, {"indices"}, stage_indices},
      {"select-vars", {f::supervised_in}, {"select"}, stage_select_vars},
      {"enumerate", {f::source}, {"formulas"}, stage_enumerate},
      {"train", {f::supervised_in, f::formulas, f::source}, {"models"}, stage_train},
      {"gate", {f::models}, {"gate"}, stage_gate},
      {"prune", {f::models, f::survivors, f::supervised_in}, {"prune"}, stage_prune},
      {"ensemble", {f::models, f::members, f::supervised_in}, {"ensemble"}, stage_ensemble},
      {"evaluate", {f::models, f::ensembles, f::supervised_out, f::formulas}, {"evaluate"}, stage_evaluate},
      {"report",
       {f::predictions, f::audit, f::gate_funnel, f::gate_decisions, f::source_decision, f::raw, f::formulas,
        f::survivors, f::members, "evaluate/champions.csv"},
       {"report"},
       stage_report},
  };
  return stages;
}

inline const StageSpec& find_stage(std::string_view name) {
  for (const auto& s : stage_table()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown stage '" + std::string(name) + "'");
}

}  // namespace droughtens::pipeline
