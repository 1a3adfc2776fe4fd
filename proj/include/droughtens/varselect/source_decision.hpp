#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/text.hpp"
#include "droughtens/indices/catalog.hpp"
#include "droughtens/indices/supervised.hpp"
#include "droughtens/stats/ols.hpp"
#include "droughtens/varselect/lmg.hpp"
#include "droughtens/varselect/shapiro_wilk.hpp"
#include "droughtens/varselect/spearman.hpp"
#include "droughtens/varselect/stepwise.hpp"

namespace droughtens::varselect {

struct VariableEvidence {
  std::string name;
  std::string source;
  std::string role;
  double spearman = 0.0;
  double aic = 0.0;        // single-variable model
  double importance = 0.0; // LMG share in the union model
  bool stepwise_selected = false;
  NormalityResult normality;
};

struct SourceDecision {
  std::string source_a;
  std::string source_b;
  std::vector<VariableEvidence> variables;  // source A roles, then source B roles
  double mean_spearman_a = 0.0;
  double mean_spearman_b = 0.0;
  std::vector<std::string> stepwise_selected;
  double stepwise_aic = 0.0;
  double full_model_r2 = 0.0;
  std::string chosen;
  bool tie = false;
  double alpha = 0.05;
};

inline RegressionData regression_data(const indices::SupervisedDataset& d, const std::vector<std::string>& names) {
  RegressionData out;
  out.names = names;
  out.x.resize(static_cast<Eigen::Index>(d.rows()), static_cast<Eigen::Index>(names.size()));
  out.y.resize(static_cast<Eigen::Index>(d.rows()));
  const auto cols = d.feature_indices(names);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = d.feature(r, cols[j]);
    }
    out.y(static_cast<Eigen::Index>(r)) = d.target[r];
  }
  return out;
}

// Picks the rainfall source whose six variables correlate better (mean
// Spearman rho) with the lead target; every other statistic is evidence.
// Exact ties resolve to source A with the tie flag set.
inline SourceDecision compare_sources(const indices::SupervisedDataset& d, indices::Source source_a,
                                      indices::Source source_b, double alpha = 0.05) {
  SourceDecision out;
  out.source_a = std::string(indices::to_string(source_a));
  out.source_b = std::string(indices::to_string(source_b));
  out.alpha = alpha;

  std::vector<std::string> names;
  for (auto src : {source_a, source_b}) {
    for (auto role : indices::kPrecipitationRoles) names.push_back(indices::precipitation_name(src, role));
  }
  const auto data = regression_data(d, names);
  std::vector<int> all(names.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);

  const auto step = stepwise_bidirectional(data, all);
  const auto shares = lmg_importance(data, all);
  out.full_model_r2 = subset_r2(data, all).back();
  out.stepwise_aic = step.aic;
  for (int s : step.selected) out.stepwise_selected.push_back(names[static_cast<std::size_t>(s)]);

  const std::size_t roles = indices::kPrecipitationRoles.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    VariableEvidence ev;
    ev.name = names[i];
    ev.source = i < roles ? out.source_a : out.source_b;
    ev.role = std::string(indices::kPrecipitationRoles[i % roles]);
    const auto col = d.column(names[i]);
    ev.spearman = spearman(col, d.target);
    ev.aic = aic_linear(data, {static_cast<int>(i)});
    ev.importance = shares[i];
    ev.stepwise_selected = std::find(step.selected.begin(), step.selected.end(), static_cast<int>(i)) != step.selected.end();
    std::vector<double> sample(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(col.size(), 5000)));
    ev.normality = shapiro_wilk(sample);
    (i < roles ? out.mean_spearman_a : out.mean_spearman_b) += ev.spearman / static_cast<double>(roles);
    out.variables.push_back(ev);
  }
  out.tie = out.mean_spearman_a == out.mean_spearman_b;
  out.chosen = out.mean_spearman_b > out.mean_spearman_a ? out.source_b : out.source_a;
  return out;
}

// Tabular evidence: one row per variable plus summary rows.
inline void write_source_decision(const SourceDecision& s, std::ostream& out) {
  using text::format_double;
  out << "variable,source,role,spearman,aic,lmg_share,stepwise_selected,shapiro_w,shapiro_p,normal_at_alpha\n";
  for (const auto& v : s.variables) {
    out << v.name << ',' << v.source << ',' << v.role << ',' << format_double(v.spearman) << ','
        << format_double(v.aic) << ',' << format_double(v.importance) << ',' << (v.stepwise_selected ? 1 : 0) << ','
        << format_double(v.normality.w) << ',' << format_double(v.normality.p_value) << ','
        << (v.normality.rejects_normality(s.alpha) ? 0 : 1) << '\n';
  }
  out << "#mean_spearman," << s.source_a << ',' << format_double(s.mean_spearman_a) << '\n';
  out << "#mean_spearman," << s.source_b << ',' << format_double(s.mean_spearman_b) << '\n';
  out << "#full_model_r2," << format_double(s.full_model_r2) << '\n';
  out << "#stepwise," << format_double(s.stepwise_aic) << ',' << text::join(s.stepwise_selected, " + ") << '\n';
  out << "#chosen," << s.chosen << ",tie=" << (s.tie ? 1 : 0) << '\n';
}

}  // namespace droughtens::varselect
