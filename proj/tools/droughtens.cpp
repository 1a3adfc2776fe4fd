#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "droughtens/core/errors.hpp"
#include "droughtens/modelspace/enumerate.hpp"
#include "droughtens/pipeline/config.hpp"
#include "droughtens/pipeline/run.hpp"

namespace dp = droughtens::pipeline;

namespace {

struct Globals {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<long long> seed;
  std::optional<std::string> out;
  std::optional<long long> threads;
};

// Flag value bound to a config key, applied only when given.
struct Override {
  std::string key;
  std::string value;
};

dp::RunConfig resolve(const Globals& g, const std::vector<Override>& overrides) {
  dp::RunConfig cfg = g.config_file.empty() ? dp::RunConfig{} : dp::load_config(g.config_file);
  for (const auto& s : g.sets) cfg.set_assignment(s);
  if (g.seed) cfg.set("run.seed", std::to_string(*g.seed));
  if (g.out) cfg.set("run.out", *g.out);
  if (g.threads) cfg.set("run.threads", std::to_string(*g.threads));
  for (const auto& o : overrides) {
    if (!o.value.empty()) cfg.set(o.key, o.value);
  }
  return cfg;
}

void run_single(const dp::RunConfig& cfg, const std::string& stage) {
  const dp::StageContext ctx{cfg, cfg.get("run.out")};
  dp::execute_stage(ctx, dp::find_stage(stage));
  std::cout << stage << ": done (" << ctx.out.string() << ")\n";
}

void print_gate_summary(const dp::RunConfig& cfg) {
  const dp::fs::path out = cfg.get("run.out");
  std::cout << dp::read_file(out / dp::stage_files::gate_funnel);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drought forecasting ensembles: over-produce, gate, prune and combine vegetation-condition models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_file, "INI-style run configuration")->check(CLI::ExistingFile);
  app.add_option("--set", g.sets, "Override a config key: section.key=value (repeatable)");
  app.add_option("--seed", g.seed, "Global seed");
  app.add_option("--out", g.out, "Run directory");
  app.add_option("--threads", g.threads, "Worker threads (never changes results)");

  std::vector<Override> ov;
  auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    ov.push_back({key, ""});
    const std::size_t idx = ov.size() - 1;
    return sub->add_option_function<std::string>(flag, [&ov, idx](const std::string& v) { ov[idx].value = v; }, help);
  };

  auto* synth = app.add_subcommand("synth", "Generate the synthetic input table into <out>/data");
  bind(synth, "--units", "synth.units", "Number of units");
  bind(synth, "--months", "synth.months", "Months per unit");
  bind(synth, "--synth-seed", "synth.seed", "Generator seed (defaults to --seed)");

  auto* ingest = app.add_subcommand("ingest", "Validate and load a unit,date,... CSV into <out>/data");
  bind(ingest, "--input", "data.input", "Input CSV")->check(CLI::ExistingFile);
  bool interpolate = false;
  ingest->add_flag("--interpolate-short-gaps", interpolate, "Fill interior gaps of at most two months");

  auto* indices = app.add_subcommand("indices", "Derive drought indices and the supervised datasets");
  auto* selectv = app.add_subcommand("select-vars", "Choose the rainfall source from in-sample evidence");
  bind(selectv, "--source", "select.source", "auto, TAMSAT or CHIRPS");

  auto* enumerate = app.add_subcommand("enumerate", "Enumerate the constrained model space");
  std::string catalog;
  enumerate->add_option("--catalog", catalog, "Print formulas for a catalog (default, TAMSAT, CHIRPS) and exit");

  auto* train = app.add_subcommand("train", "Train bagged ANN and SVR models for every formula");
  bind(train, "--repeats", "split.repeats", "Bagging repeats K");
  bind(train, "--svr-cost", "learners.svr_cost", "SVR cost C");
  bind(train, "--svr-epsilon", "learners.svr_epsilon", "SVR tube width");
  bind(train, "--grid-search", "learners.svr_grid_search", "true to grid-search C, epsilon and gamma");

  auto* gate = app.add_subcommand("gate", "Keep formulas that pass the R² cutoff without overfitting");
  bind(gate, "--r2-min", "gate.r2_min", "Validation R² cutoff");
  bind(gate, "--overfit-tol", "gate.overfit_tolerance", "Allowed train-validation R² loss");

  auto* prune = app.add_subcommand("prune", "Backward-forward ensemble member selection");
  bind(prune, "--batch", "ensemble.batch", "Batch size of the backward phase");

  auto* ens = app.add_subcommand("ensemble", "Fit simple, weighted and stacked combiners");
  bind(ens, "--combiners", "ensemble.combiners", "Comma list of simple, weighted, stacked");
  auto* evaluate = app.add_subcommand("evaluate", "Predict the out-of-sample rows with every approach");
  auto* report = app.add_subcommand("report", "Write metric tables, agreement strips and the run manifest");
  auto* run = app.add_subcommand("run", "Run every stage, skipping those already complete");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (interpolate) ov.push_back({"data.interpolate_short_gaps", "true"});
    auto cfg = resolve(g, ov);
    if (*synth) cfg.set("data.input", "");

    if (*enumerate && !catalog.empty()) {
      const auto src = catalog == "default" ? droughtens::indices::Source::Tamsat
                                            : droughtens::indices::parse_source(catalog);
      const auto formulas = droughtens::modelspace::enumerate_constrained(droughtens::indices::modeling_catalog(src));
      droughtens::modelspace::write_formulas(formulas, std::cout);
      return 0;
    }
    if (*run) {
      const auto summary = dp::run_pipeline(cfg);
      std::cout << "executed:";
      for (const auto& s : summary.executed) std::cout << ' ' << s;
      std::cout << "\nskipped:";
      for (const auto& s : summary.skipped) std::cout << ' ' << s;
      std::cout << "\nreport: " << (dp::fs::path(cfg.get("run.out")) / "report").string() << '\n';
      return 0;
    }
    if (*synth || *ingest) run_single(cfg, "data");
    else if (*indices) run_single(cfg, "indices");
    else if (*selectv) run_single(cfg, "select-vars");
    else if (*enumerate) run_single(cfg, "enumerate");
    else if (*train) run_single(cfg, "train");
    else if (*gate) {
      run_single(cfg, "gate");
      print_gate_summary(cfg);
    } else if (*prune) run_single(cfg, "prune");
    else if (*ens) run_single(cfg, "ensemble");
    else if (*evaluate) run_single(cfg, "evaluate");
    else if (*report) run_single(cfg, "report");
    return 0;
  } catch (const droughtens::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const droughtens::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const droughtens::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
