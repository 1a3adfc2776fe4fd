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
#include "droughtens/core/table.hpp"
#include "droughtens/core/text.hpp"
#include "droughtens/eval/classes.hpp"
#include "droughtens/eval/metrics.hpp"

namespace droughtens::eval {

inline constexpr std::string_view kOverall = "OVERALL";

// Out-of-sample rows keyed by (unit, target month), with observed VCI3M.
struct EvaluationRows {
  std::vector<RowKey> keys;
  std::vector<double> actual;
};

struct ApproachPrediction {
  std::string name;
  std::vector<double> predicted;  // aligned with EvaluationRows
};

// Undefined cells hold NaN and are written blank.
struct MetricsRecord {
  std::string approach;
  std::string group;  // unit id or OVERALL
  std::size_t n = 0;
  double r2 = kMissing;
  int sign = 0;
  double r2_determination = kMissing;
  double rmse = kMissing;
  double mae = kMissing;
  double mape = kMissing;
  std::size_t mape_skipped = 0;
  double accuracy = kMissing;
  double auroc = kMissing;
  double recall = kMissing;
  double drought_exact = kMissing;
};

struct Evaluation {
  std::vector<std::string> groups;  // units in order, then OVERALL
  std::vector<MetricsRecord> records;  // approach-major, group-minor
  std::vector<std::string> warnings;

  const MetricsRecord& at(const std::string& approach, std::string_view group) const {
    for (const auto& r : records) {
      if (r.approach == approach && r.group == group) return r;
    }
    throw DataError("no metrics for " + approach + " / " + std::string(group));
  }
};

namespace detail {

inline void guarded(double& slot, const std::string& what, std::vector<std::string>& warnings,
                    const std::function<double()>& fn) {
  try {
    slot = fn();
  } catch (const DataError& e) {
    slot = kMissing;
    warnings.push_back(what + ": " + e.what());
  } catch (const NumericalError& e) {
    slot = kMissing;
    warnings.push_back(what + ": " + e.what());
  }
}

inline MetricsRecord score(const std::string& approach, const std::string& group, const std::vector<double>& pred,
                           const std::vector<double>& act, std::vector<std::string>& warnings) {
  MetricsRecord m;
  m.approach = approach;
  m.group = group;
  m.n = act.size();
  const std::string where = approach + " / " + group;
  if (act.empty()) {
    warnings.push_back(where + ": no rows");
    return m;
  }
  guarded(m.r2, where + " r2", warnings, [&] { return r2(pred, act); });
  m.sign = correlation_sign(pred, act);
  guarded(m.r2_determination, where + " r2_determination", warnings, [&] { return r2_determination(pred, act); });
  const auto em = error_metrics(pred, act);
  m.rmse = em.rmse;
  m.mae = em.mae;
  m.mape = em.mape;
  m.mape_skipped = em.mape_skipped;
  const auto pc = classify_all(pred), ac = classify_all(act);
  m.accuracy = accuracy(pc, ac);
  guarded(m.auroc, where + " auroc", warnings, [&] { return drought_auroc(pred, act); });
  guarded(m.recall, where + " recall", warnings, [&] { return moderate_extreme_recall(pc, ac); });
  guarded(m.drought_exact, where + " drought agreement", warnings, [&] { return drought_exact_agreement(pc, ac); });
  return m;
}

}  // namespace detail

// Per-unit metrics plus OVERALL on the pooled rows of every unit.
inline Evaluation evaluate_approaches(const EvaluationRows& rows, const std::vector<ApproachPrediction>& approaches) {
  if (rows.keys.size() != rows.actual.size()) throw DataError("evaluation rows misaligned");
  Evaluation ev;
  std::vector<std::string> units;
  for (const auto& k : rows.keys) {
    if (std::find(units.begin(), units.end(), k.unit) == units.end()) units.push_back(k.unit);
  }
  ev.groups = units;
  ev.groups.emplace_back(kOverall);
  for (const auto& a : approaches) {
    if (a.predicted.size() != rows.actual.size()) throw DataError("approach " + a.name + ": predictions misaligned");
    for (const auto& g : ev.groups) {
      std::vector<double> p, y;
      for (std::size_t i = 0; i < rows.keys.size(); ++i) {
        if (g != kOverall && rows.keys[i].unit != g) continue;
        p.push_back(a.predicted[i]);
        y.push_back(rows.actual[i]);
      }
      ev.records.push_back(detail::score(a.name, g, p, y, ev.warnings));
    }
  }
  return ev;
}

// approach x group table of one metric.
inline std::string metric_table(const Evaluation& ev, const std::function<double(const MetricsRecord&)>& pick) {
  std::ostringstream out;
  out << "approach";
  for (const auto& g : ev.groups) out << ',' << g;
  out << '\n';
  std::string current;
  for (const auto& r : ev.records) {
    if (r.approach != current) {
      if (!current.empty()) out << '\n';
      current = r.approach;
      out << r.approach;
    }
    out << ',' << text::format_double(pick(r));
  }
  if (!current.empty()) out << '\n';
  return out.str();
}

inline std::string detailed_table(const Evaluation& ev) {
  using text::format_double;
  std::ostringstream out;
  out << "approach,group,n,r2,correlation_sign,r2_determination,rmse,mae,mape,mape_skipped,accuracy,auroc,"
         "drought_recall,drought_exact_agreement\n";
  for (const auto& r : ev.records) {
    out << r.approach << ',' << r.group << ',' << r.n << ',' << format_double(r.r2) << ',' << r.sign << ','
        << format_double(r.r2_determination) << ',' << format_double(r.rmse) << ',' << format_double(r.mae) << ','
        << format_double(r.mape) << ',' << r.mape_skipped << ',' << format_double(r.accuracy) << ','
        << format_double(r.auroc) << ',' << format_double(r.recall) << ',' << format_double(r.drought_exact) << '\n';
  }
  return out.str();
}

// One row per (approach, unit, month): observed and predicted class and a match flag.
inline std::string agreement_strip(const EvaluationRows& rows, const std::vector<ApproachPrediction>& approaches) {
  std::ostringstream out;
  out << "approach,unit,month,actual_vci3m,predicted_vci3m,actual_class,predicted_class,match\n";
  for (const auto& a : approaches) {
    for (std::size_t i = 0; i < rows.keys.size(); ++i) {
      const auto ac = classify_vci3m(rows.actual[i]), pc = classify_vci3m(a.predicted[i]);
      out << a.name << ',' << rows.keys[i].unit << ',' << rows.keys[i].month.str() << ','
          << text::format_double(rows.actual[i]) << ',' << text::format_double(a.predicted[i]) << ',' << ac.value
          << ',' << pc.value << ',' << (ac == pc ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

// Every report file name mapped to its contents.
inline std::map<std::string, std::string> render_report(const EvaluationRows& rows,
                                                        const std::vector<ApproachPrediction>& approaches,
                                                        const Evaluation& ev) {
  std::map<std::string, std::string> files;
  files["regression_r2.csv"] = metric_table(ev, [](const MetricsRecord& r) { return r.r2; });
  files["classification_accuracy.csv"] = metric_table(ev, [](const MetricsRecord& r) { return r.accuracy; });
  files["drought_auroc.csv"] = metric_table(ev, [](const MetricsRecord& r) { return r.auroc; });
  files["drought_recall.csv"] = metric_table(ev, [](const MetricsRecord& r) { return r.recall; });
  files["drought_exact_agreement.csv"] = metric_table(ev, [](const MetricsRecord& r) { return r.drought_exact; });
  files["metrics_detailed.csv"] = detailed_table(ev);
  files["agreement_strip.csv"] = agreement_strip(rows, approaches);
  std::string w;
  for (const auto& line : ev.warnings) w += "blank cell: " + line + '\n';
  files["warnings.txt"] = w;
  return files;
}

inline void write_files(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    out << body;
  }
}

}  // namespace droughtens::eval
