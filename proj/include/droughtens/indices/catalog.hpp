#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "droughtens/core/errors.hpp"

namespace droughtens::indices {

enum class Category { Vegetation, Precipitation, Influencer };
enum class Source { None, Tamsat, Chirps };
enum class Transform { None, RelativeRange, GammaStandardized, LogLogisticStandardized };

inline constexpr std::array<Category, 3> kCategories = {Category::Vegetation, Category::Precipitation,
                                                        Category::Influencer};

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::Vegetation: return "vegetation";
    case Category::Precipitation: return "precipitation";
    case Category::Influencer: return "influencer";
  }
  return "?";
}

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::None: return "NONE";
    case Source::Tamsat: return "TAMSAT";
    case Source::Chirps: return "CHIRPS";
  }
  return "?";
}

inline Source parse_source(std::string_view s) {
  if (s == "TAMSAT" || s == "tamsat") return Source::Tamsat;
  if (s == "CHIRPS" || s == "chirps") return Source::Chirps;
  if (s == "NONE" || s == "none") return Source::None;
  throw ConfigError("unknown rainfall source '" + std::string(s) + "'");
}

// How one modelling variable is derived from the base columns.
struct VariableEntry {
  std::string name;
  Category category = Category::Vegetation;
  Source source = Source::None;
  std::string base;            // base column
  std::string subtract;        // optional second base column (P - PET)
  int aggregate_months = 1;    // trailing rolling-mean window
  Transform transform = Transform::None;
  std::string fallback_base;   // used when `base` is absent (dekadal -> monthly alias)

  std::string lineage() const {
    std::string out = base;
    if (!subtract.empty()) out += " - " + subtract;
    if (aggregate_months > 1) out += " -> rolling_mean(" + std::to_string(aggregate_months) + ")";
    switch (transform) {
      case Transform::None: break;
      case Transform::RelativeRange: out += " -> relative_range"; break;
      case Transform::GammaStandardized: out += " -> standardized(gamma)"; break;
      case Transform::LogLogisticStandardized: out += " -> standardized(log-logistic)"; break;
    }
    return out;
  }
};

class VariableCatalog {
 public:
  VariableCatalog() = default;
  explicit VariableCatalog(std::vector<VariableEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (entries_[i].name == entries_[j].name) throw ConfigError("duplicate catalog entry " + entries_[i].name);
      }
    }
  }

  const std::vector<VariableEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool contains(std::string_view name) const { return find(name) != nullptr; }

  const VariableEntry& at(std::string_view name) const {
    if (auto* e = find(name)) return *e;
    throw ConfigError("variable '" + std::string(name) + "' not in catalog");
  }

  std::size_t position(std::string_view name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].name == name) return i;
    }
    throw ConfigError("variable '" + std::string(name) + "' not in catalog");
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (auto& e : entries_) out.push_back(e.name);
    return out;
  }

  std::vector<std::string> names_in(Category c) const {
    std::vector<std::string> out;
    for (auto& e : entries_) {
      if (e.category == c) out.push_back(e.name);
    }
    return out;
  }

  std::vector<std::string> names_from(Source s) const {
    std::vector<std::string> out;
    for (auto& e : entries_) {
      if (e.source == s) out.push_back(e.name);
    }
    return out;
  }

  // Sub-catalog keeping entries whose source is None or `s`, in order.
  VariableCatalog restricted_to(Source s) const {
    std::vector<VariableEntry> kept;
    for (auto& e : entries_) {
      if (e.source == Source::None || e.source == s) kept.push_back(e);
    }
    return VariableCatalog(std::move(kept));
  }

 private:
  const VariableEntry* find(std::string_view name) const {
    for (auto& e : entries_) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }

  std::vector<VariableEntry> entries_;
};

inline constexpr std::string_view kTargetVariable = "VCI3M";

// Role suffixes of the six precipitation variables; the full name carries
// the source prefix (TAMSAT_RFE1M, CHIRPS_SPI3M, ...).
inline constexpr std::array<std::string_view, 6> kPrecipitationRoles = {"RFE1M", "RFE3M", "RCI1M",
                                                                        "RCI3M", "SPI1M", "SPI3M"};

inline std::string precipitation_name(Source s, std::string_view role) {
  return std::string(to_string(s)) + "_" + std::string(role);
}

inline std::vector<VariableEntry> precipitation_entries(Source s, const std::string& rain_column) {
  using T = Transform;
  auto entry = [&](std::string_view role, int agg, T t) {
    return VariableEntry{precipitation_name(s, role), Category::Precipitation, s, rain_column, "", agg, t, ""};
  };
  return {entry("RFE1M", 1, T::None),          entry("RFE3M", 3, T::None),
          entry("RCI1M", 1, T::RelativeRange), entry("RCI3M", 3, T::RelativeRange),
          entry("SPI1M", 1, T::GammaStandardized), entry("SPI3M", 3, T::GammaStandardized)};
}

struct BaseColumns {
  std::string ndvi = "NDVI";
  std::string ndvi_dekad = "NDVI_DEKAD";
  std::string lst = "LST";
  std::string evt = "EVT";
  std::string pet = "PET";
  std::string tamsat_rain = "RFE";
  std::string chirps_rain = "CHIRPS_RFE";
};

// Every derivable variable: vegetation, both rainfall sources, influencers.
inline VariableCatalog full_catalog(const BaseColumns& base = {}) {
  using C = Category;
  using T = Transform;
  std::vector<VariableEntry> v = {
      {"VCI3M", C::Vegetation, Source::None, base.ndvi, "", 3, T::RelativeRange, ""},
      {"NDVIDekad", C::Vegetation, Source::None, base.ndvi_dekad, "", 1, T::None, base.ndvi},
      {"VCI1M", C::Vegetation, Source::None, base.ndvi, "", 1, T::RelativeRange, ""},
      {"VCIdekad", C::Vegetation, Source::None, base.ndvi_dekad, "", 1, T::RelativeRange, base.ndvi},
  };
  for (auto& e : precipitation_entries(Source::Tamsat, base.tamsat_rain)) v.push_back(e);
  for (auto& e : precipitation_entries(Source::Chirps, base.chirps_rain)) v.push_back(e);
  std::vector<VariableEntry> influencers = {
      {"LST1M", C::Influencer, Source::None, base.lst, "", 1, T::None, ""},
      {"EVT1M", C::Influencer, Source::None, base.evt, "", 1, T::None, ""},
      {"PET1M", C::Influencer, Source::None, base.pet, "", 1, T::None, ""},
      {"TCI1M", C::Influencer, Source::None, base.lst, "", 1, T::RelativeRange, ""},
      {"SPEI1M", C::Influencer, Source::None, base.tamsat_rain, base.pet, 1, T::LogLogisticStandardized, ""},
      {"SPEI3M", C::Influencer, Source::None, base.tamsat_rain, base.pet, 3, T::LogLogisticStandardized, ""},
  };
  for (auto& e : influencers) v.push_back(e);
  return VariableCatalog(std::move(v));
}

// The sixteen modelling variables once a rainfall source is chosen.
inline VariableCatalog modeling_catalog(Source s = Source::Tamsat, const BaseColumns& base = {}) {
  return full_catalog(base).restricted_to(s);
}

}  // namespace droughtens::indices
