#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/pipeline/config.hpp"
#include "droughtens/pipeline/stages.hpp"

namespace droughtens::pipeline {

struct StageMarker {
  std::string stage;
  std::string key;     // config digest + input content
  std::string output;  // content hash of the stage's outputs
};

inline fs::path marker_path(const fs::path& out, const std::string& stage) { return out / ".markers" / (stage + ".done"); }

inline std::optional<StageMarker> read_marker(const fs::path& out, const std::string& stage) {
  const auto p = marker_path(out, stage);
  if (!fs::exists(p)) return std::nullopt;
  StageMarker m;
  for (const auto& line : read_lines(p)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto k = line.substr(0, eq), v = line.substr(eq + 1);
    if (k == "stage") m.stage = v;
    else if (k == "key") m.key = v;
    else if (k == "output") m.output = v;
  }
  return m;
}

inline std::string stage_key(const StageContext& c, const StageSpec& s) {
  ContentHash h;
  h.update(s.name);
  h.update(c.config.digest());
  h.update(hash_paths(c.out, s.inputs));
  if (s.name == "data" && !c.config.get("data.input").empty()) h.update(read_file(c.config.get("data.input")));
  return h.hex();
}

inline bool stage_is_current(const StageContext& c, const StageSpec& s) {
  const auto m = read_marker(c.out, s.name);
  return m && m->stage == s.name && m->key == stage_key(c, s) && m->output == hash_paths(c.out, s.outputs);
}

// Rethrows `e` as the same error class with a stage prefix and resume hint.
[[noreturn]] inline void rethrow_with_stage(const std::string& stage, const StageContext& c) {
  const std::string hint = "; resume with: droughtens " + stage + " --out " + c.out.string() + " (plus the same --config/--set)";
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + stage + ": " + e.what() + hint);
  } catch (const DataError& e) {
    throw DataError("stage " + stage + ": " + e.what() + hint);
  } catch (const NumericalError& e) {
    throw NumericalError("stage " + stage + ": " + e.what() + hint);
  } catch (const std::filesystem::filesystem_error& e) {
    throw DataError("stage " + stage + ": " + e.what() + hint);
  }
}

// Runs one stage unconditionally: clears its outputs, executes, writes the marker.
inline void execute_stage(const StageContext& c, const StageSpec& s) {
  const auto key = stage_key(c, s);
  fs::remove(marker_path(c.out, s.name));
  for (const auto& o : s.outputs) fs::remove_all(c.out / o);
  try {
    s.run(c);
  } catch (...) {
    rethrow_with_stage(s.name, c);
  }
  write_file(marker_path(c.out, s.name),
             "stage=" + s.name + "\nkey=" + key + "\noutput=" + hash_paths(c.out, s.outputs) + "\n");
}

struct RunSummary {
  std::vector<std::string> executed;
  std::vector<std::string> skipped;
};

// All stages in order; a stage whose marker matches its inputs, config and
// outputs is skipped.
inline RunSummary run_pipeline(const RunConfig& cfg, const fs::path& out) {
  const StageContext c{cfg, out};
  fs::create_directories(out);
  RunSummary summary;
  for (const auto& s : stage_table()) {
    if (stage_is_current(c, s)) {
      summary.skipped.push_back(s.name);
      continue;
    }
    execute_stage(c, s);
    summary.executed.push_back(s.name);
  }
  return summary;
}

inline RunSummary run_pipeline(const RunConfig& cfg) { return run_pipeline(cfg, cfg.get("run.out")); }

}  // namespace droughtens::pipeline
