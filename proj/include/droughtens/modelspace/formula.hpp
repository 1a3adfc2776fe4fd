#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/core/text.hpp"
#include "droughtens/indices/catalog.hpp"

namespace droughtens::modelspace {

struct Predictor {
  std::string name;
  indices::Category category = indices::Category::Vegetation;
  int lag = 1;

  std::string term() const { return name + "_lag" + std::to_string(lag); }
  friend bool operator==(const Predictor&, const Predictor&) = default;
};

// Target plus at most one predictor per category, kept in canonical
// (vegetation, precipitation, influencer) order.
struct ModelFormula {
  std::string target = "VCI3M";
  int lead = 1;
  std::vector<Predictor> predictors;

  std::vector<std::string> predictor_names() const {
    std::vector<std::string> out;
    for (auto& p : predictors) out.push_back(p.name);
    return out;
  }

  std::array<int, 3> category_signature() const {
    std::array<int, 3> sig{0, 0, 0};
    for (auto& p : predictors) ++sig[static_cast<std::size_t>(p.category)];
    return sig;
  }

  // `VCI3M_lead1 ~ VCIdekad_lag1 + TAMSAT_SPI3M_lag1 + TCI1M_lag1`
  std::string str() const {
    std::string out = target + "_lead" + std::to_string(lead) + " ~ ";
    for (std::size_t i = 0; i < predictors.size(); ++i) {
      if (i) out += " + ";
      out += predictors[i].term();
    }
    return out;
  }

  friend bool operator==(const ModelFormula& a, const ModelFormula& b) {
    return a.target == b.target && a.lead == b.lead && a.predictors == b.predictors;
  }
};

inline void canonicalize(ModelFormula& f) {
  std::stable_sort(f.predictors.begin(), f.predictors.end(),
                   [](const Predictor& a, const Predictor& b) { return a.category < b.category; });
}

inline void validate(const ModelFormula& f) {
  if (f.predictors.empty() || f.predictors.size() > 3) throw ConfigError("formula needs 1..3 predictors: " + f.str());
  for (int c : f.category_signature()) {
    if (c > 1) throw ConfigError("formula has two predictors of one category: " + f.str());
  }
}

// Stable across runs and platforms: a hash of the sorted predictor terms,
// the target and the lead.
inline std::string formula_id(const ModelFormula& f) {
  std::vector<std::string> terms;
  for (auto& p : f.predictors) terms.push_back(p.term());
  std::sort(terms.begin(), terms.end());
  const auto key = f.target + "_lead" + std::to_string(f.lead) + "~" + text::join(terms, "+");
  return "m" + hex64(fnv1a64(key)).substr(4);
}

// Inverse of ModelFormula::str(); categories are looked up in `catalog`.
inline ModelFormula parse_formula(std::string_view line, const indices::VariableCatalog& catalog) {
  const auto tilde = line.find('~');
  if (tilde == std::string_view::npos) throw ConfigError("formula without '~': " + std::string(line));
  ModelFormula f;
  const auto lhs = std::string(text::trim(line.substr(0, tilde)));
  const auto lead_pos = lhs.rfind("_lead");
  if (lead_pos == std::string::npos) throw ConfigError("formula target lacks _lead suffix: " + lhs);
  f.target = lhs.substr(0, lead_pos);
  f.lead = std::stoi(lhs.substr(lead_pos + 5));
  for (auto term : text::split(line.substr(tilde + 1), '+')) {
    const auto t = std::string(term);
    const auto lag_pos = t.rfind("_lag");
    if (lag_pos == std::string::npos) throw ConfigError("predictor lacks _lag suffix: " + t);
    Predictor p;
    p.name = t.substr(0, lag_pos);
    p.lag = std::stoi(t.substr(lag_pos + 4));
    p.category = catalog.at(p.name).category;
    f.predictors.push_back(p);
  }
  canonicalize(f);
  validate(f);
  return f;
}

inline void write_formulas(const std::vector<ModelFormula>& formulas, std::ostream& out) {
  for (auto& f : formulas) out << f.str() << '\n';
}

inline std::vector<ModelFormula> read_formulas(std::istream& in, const indices::VariableCatalog& catalog) {
  std::vector<ModelFormula> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!text::trim(line).empty()) out.push_back(parse_formula(line, catalog));
  }
  return out;
}

}  // namespace droughtens::modelspace
