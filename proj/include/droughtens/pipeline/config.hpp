#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/core/split.hpp"
#include "droughtens/core/synthetic.hpp"
#include "droughtens/core/text.hpp"
#include "droughtens/ensemble/ensemble.hpp"
#include "droughtens/ensemble/gate.hpp"
#include "droughtens/indices/variables.hpp"
#include "droughtens/learners/bagging.hpp"

namespace droughtens::pipeline {

// Every recognised key with its default. Keys are "section.name".
inline const std::map<std::string, std::string>& config_defaults() {
  static const std::map<std::string, std::string> d = {
      {"run.seed", "0"},
      {"run.out", "run"},
      {"run.threads", "1"},
      {"data.input", ""},
      {"data.interpolate_short_gaps", "false"},
      {"synth.units", "4"},
      {"synth.months", "204"},
      {"synth.seed", ""},
      {"synth.start", "2001-03"},
      {"synth.rain_coupling", "1"},
      {"synth.second_rain_source", "true"},
      {"split.holdout_months", "24"},
      {"split.ratio", "0.7"},
      {"split.repeats", "5"},
      {"indices.slotting", "per_calendar_month"},
      {"indices.per_month_distributions", "true"},
      {"indices.min_fit_observations", "10"},
      {"select.source", "auto"},
      {"select.alpha", "0.05"},
      {"learners.techniques", "ANN,SVR"},
      {"learners.lead", "1"},
      {"learners.ann_hidden", "auto"},
      {"learners.ann_max_epochs", "2000"},
      {"learners.ann_patience", "50"},
      {"learners.svr_cost", "32"},
      {"learners.svr_epsilon", "0.2"},
      {"learners.svr_gamma", "auto"},
      {"learners.svr_max_iterations", "0"},
      {"learners.svr_scale_target", "false"},
      {"learners.svr_grid_search", "false"},
      {"gate.r2_min", "0.7"},
      {"gate.overfit_tolerance", "0.03"},
      {"ensemble.batch", "5"},
      {"ensemble.combiners", "simple,weighted,stacked"},
      {"ensemble.stacker_hidden", ""},
      {"ensemble.stacker_max_epochs", "2000"},
      {"ensemble.stacker_patience", "50"},
  };
  return d;
}

// Keys that never change results and so stay out of the digest.
inline bool is_operational_key(const std::string& key) { return key == "run.threads" || key == "run.out"; }

class RunConfig {
 public:
  RunConfig() : values_(config_defaults()) {}

  void set(const std::string& key, const std::string& value) {
    if (!config_defaults().count(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = std::string(text::trim(value));
  }

  // "section.key=value"
  void set_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    set(std::string(text::trim(assignment.substr(0, eq))), std::string(assignment.substr(eq + 1)));
  }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    double v = 0.0;
    if (!text::parse_double(get(key), v)) throw ConfigError(key + " must be a number, got '" + get(key) + "'");
    return v;
  }

  long long integer(const std::string& key) const {
    const double v = number(key);
    if (v != static_cast<double>(static_cast<long long>(v))) throw ConfigError(key + " must be an integer");
    return static_cast<long long>(v);
  }

  bool flag(const std::string& key) const {
    const auto& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + " must be true or false, got '" + v + "'");
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    for (auto part : text::split(get(key), ',')) {
      auto t = text::trim(part);
      if (!t.empty()) out.emplace_back(t);
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  // Canonical "[section]" / "key = value" text; parse(serialize()) round-trips.
  std::string serialize(bool include_operational = true) const {
    std::ostringstream out;
    std::string section;
    for (const auto& [key, value] : values_) {
      if (!include_operational && is_operational_key(key)) continue;
      const auto dot = key.find('.');
      const auto sec = key.substr(0, dot);
      if (sec != section) {
        if (!section.empty()) out << '\n';
        out << '[' << sec << "]\n";
        section = sec;
      }
      out << key.substr(dot + 1) << " = " << value << '\n';
    }
    return out.str();
  }

  std::string digest() const {
    ContentHash h;
    h.update(serialize(false));
    return h.hex();
  }

  // ---- typed views ----
  std::uint64_t seed() const {
    const auto v = integer("run.seed");
    if (v < 0) throw ConfigError("run.seed must be >= 0");
    return static_cast<std::uint64_t>(v);
  }

  unsigned threads() const {
    const auto v = integer("run.threads");
    if (v < 1) throw ConfigError("run.threads must be >= 1");
    return static_cast<unsigned>(v);
  }

  SyntheticConfig synthetic() const {
    SyntheticConfig s;
    s.units = static_cast<int>(integer("synth.units"));
    s.months = static_cast<int>(integer("synth.months"));
    s.seed = get("synth.seed").empty() ? seed() : static_cast<std::uint64_t>(integer("synth.seed"));
    s.start = YearMonth::parse(get("synth.start"));
    s.rain_coupling = number("synth.rain_coupling");
    s.second_rain_source = flag("synth.second_rain_source");
    if (s.units < 1) throw ConfigError("synth.units must be >= 1");
    return s;
  }

  SplitPlan split() const {
    SplitPlan p;
    p.holdout_months = static_cast<int>(integer("split.holdout_months"));
    p.ratio = number("split.ratio");
    p.repeats = static_cast<int>(integer("split.repeats"));
    p.seed = seed();
    p.validate();
    return p;
  }

  indices::IndexOptions index_options() const {
    indices::IndexOptions o;
    const auto& s = get("indices.slotting");
    if (s == "per_calendar_month") o.slotting = indices::Slotting::PerCalendarMonth;
    else if (s == "global") o.slotting = indices::Slotting::Global;
    else throw ConfigError("indices.slotting must be per_calendar_month or global");
    o.per_calendar_month_distributions = flag("indices.per_month_distributions");
    o.min_fit_observations = static_cast<int>(integer("indices.min_fit_observations"));
    return o;
  }

  std::vector<learners::Technique> techniques() const {
    std::vector<learners::Technique> out;
    for (const auto& t : list("learners.techniques")) {
      auto tech = learners::parse_technique(t);
      if (std::find(out.begin(), out.end(), tech) == out.end()) out.push_back(tech);
    }
    if (out.empty()) throw ConfigError("learners.techniques is empty");
    std::sort(out.begin(), out.end());
    return out;
  }

  int lead() const {
    const auto v = integer("learners.lead");
    if (v < 1) throw ConfigError("learners.lead must be >= 1");
    return static_cast<int>(v);
  }

  learners::LearnerConfig learner() const {
    learners::LearnerConfig c;
    const auto& hidden = get("learners.ann_hidden");
    if (hidden != "auto") {
      c.ann_auto_hidden = false;
      c.ann.hidden = parse_layers("learners.ann_hidden");
    }
    c.ann.max_epochs = static_cast<int>(integer("learners.ann_max_epochs"));
    c.ann.patience = static_cast<int>(integer("learners.ann_patience"));
    c.svr.cost = number("learners.svr_cost");
    c.svr.epsilon = number("learners.svr_epsilon");
    c.svr.gamma = get("learners.svr_gamma") == "auto" ? 0.0 : number("learners.svr_gamma");
    c.svr_scale_target = flag("learners.svr_scale_target");
    const auto cap = integer("learners.svr_max_iterations");  // 0 picks the size-based default
    if (cap < 0) throw ConfigError("learners.svr_max_iterations must be >= 0");
    c.svr.max_iterations = cap;
    if (c.ann.max_epochs < 0 || c.ann.patience < 1) throw ConfigError("ANN epochs must be >= 0 and patience >= 1");
    if (!(c.svr.cost > 0.0) || !(c.svr.epsilon >= 0.0) || !(c.svr.gamma >= 0.0)) {
      throw ConfigError("SVR needs cost > 0, epsilon >= 0 and gamma > 0 (or auto)");
    }
    return c;
  }

  ensemble::GateConfig gate() const {
    ensemble::GateConfig g;
    g.r2_min = number("gate.r2_min");
    g.overfit_tolerance = number("gate.overfit_tolerance");
    g.reference = techniques().front();
    g.validate();
    return g;
  }

  std::size_t batch() const {
    const auto v = integer("ensemble.batch");
    if (v < 1) throw ConfigError("ensemble.batch must be >= 1");
    return static_cast<std::size_t>(v);
  }

  std::vector<ensemble::Combiner> combiners() const {
    std::vector<ensemble::Combiner> out;
    for (const auto& c : list("ensemble.combiners")) {
      auto comb = ensemble::parse_combiner(c);
      if (std::find(out.begin(), out.end(), comb) == out.end()) out.push_back(comb);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  ensemble::StackerConfig stacker() const {
    ensemble::StackerConfig s;
    if (!get("ensemble.stacker_hidden").empty()) s.hidden = parse_layers("ensemble.stacker_hidden");
    s.hyper.max_epochs = static_cast<int>(integer("ensemble.stacker_max_epochs"));
    s.hyper.patience = static_cast<int>(integer("ensemble.stacker_patience"));
    return s;
  }

 private:
  std::vector<int> parse_layers(const std::string& key) const {
    std::vector<int> layers;
    for (const auto& part : list(key)) {
      double v = 0.0;
      if (!text::parse_double(part, v) || v < 1 || v != static_cast<int>(v)) {
        throw ConfigError(key + " must list positive layer sizes");
      }
      layers.push_back(static_cast<int>(v));
    }
    return layers;
  }

  std::map<std::string, std::string> values_;
};

// INI-style text: "[section]" headers, "key = value" lines, '#' comments.
inline void apply_config_text(RunConfig& cfg, std::istream& in) {
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = std::string(text::trim(t.substr(1, t.size() - 2)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": key outside a section");
    try {
      cfg.set(section + "." + std::string(text::trim(t.substr(0, eq))), std::string(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  RunConfig cfg;
  apply_config_text(cfg, in);
  return cfg;
}

}  // namespace droughtens::pipeline
