#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "droughtens/core/errors.hpp"
#include "droughtens/core/table.hpp"
#include "droughtens/indices/catalog.hpp"
#include "droughtens/indices/relative_range.hpp"
#include "droughtens/indices/series_ops.hpp"
#include "droughtens/indices/standardized.hpp"

namespace droughtens::indices {

struct IndexOptions {
  Slotting slotting = Slotting::PerCalendarMonth;
  bool per_calendar_month_distributions = true;
  int min_fit_observations = 10;
};

// Fitted extremes and distributions keyed by (unit, variable).
struct VariableFits {
  IndexOptions options;
  std::map<std::pair<std::string, std::string>, RelativeRangeParams> relative_range;
  std::map<std::pair<std::string, std::string>, SpiFit> standardized;
};

namespace detail {

inline const std::string& resolve_base(const TimeSeriesTable& t, const VariableEntry& e) {
  if (t.has_column(e.base)) return e.base;
  if (!e.fallback_base.empty() && t.has_column(e.fallback_base)) return e.fallback_base;
  throw DataError("missing base column '" + e.base + "' for variable " + e.name);
}

// The pre-transform series of `e` over one unit's rows.
inline std::vector<double> intermediate(const TimeSeriesTable& t, const TimeSeriesTable::UnitRange& r,
                                        const VariableEntry& e) {
  auto base = t.column(resolve_base(t, e)).subspan(r.begin, r.size());
  std::vector<double> s(base.begin(), base.end());
  if (!e.subtract.empty()) {
    auto minus = t.column(e.subtract).subspan(r.begin, r.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] -= minus[i];
  }
  if (e.aggregate_months > 1) s = rolling_mean(s, e.aggregate_months);
  return s;
}

inline std::vector<YearMonth> unit_months(const TimeSeriesTable& t, const TimeSeriesTable::UnitRange& r) {
  std::vector<YearMonth> m;
  for (std::size_t i = r.begin; i < r.end; ++i) m.push_back(t.keys()[i].month);
  return m;
}

}  // namespace detail

// Fits every transform of the catalog on `in_sample`. Passing only in-sample
// rows keeps holdout months out of every extreme and distribution fit.
inline VariableFits fit_variable_transforms(const TimeSeriesTable& in_sample, const VariableCatalog& catalog,
                                            const IndexOptions& options = {}) {
  VariableFits fits;
  fits.options = options;
  for (const auto& r : in_sample.unit_ranges()) {
    const auto months = detail::unit_months(in_sample, r);
    for (const auto& e : catalog.entries()) {
      if (e.transform == Transform::None) continue;
      const auto s = detail::intermediate(in_sample, r, e);
      const auto key = std::make_pair(r.unit, e.name);
      try {
        switch (e.transform) {
          case Transform::RelativeRange:
            fits.relative_range[key] = fit_relative_range(s, months, options.slotting);
            break;
          case Transform::GammaStandardized:
          case Transform::LogLogisticStandardized: {
            const auto dist = e.transform == Transform::GammaStandardized ? Distribution::Gamma : Distribution::LogLogistic;
            fits.standardized[key] = fit_standardized_index(s, months, dist, options.per_calendar_month_distributions,
                                                            options.min_fit_observations)
                                         .fit;
            break;
          }
          case Transform::None: break;
        }
      } catch (const DataError& err) {
        throw DataError(e.name + " (unit " + r.unit + "): " + err.what());
      } catch (const NumericalError& err) {
        throw NumericalError(e.name + " (unit " + r.unit + "): " + err.what());
      }
    }
  }
  return fits;
}

// Appends one column per catalog entry, derived with the supplied fits.
inline TimeSeriesTable build_variable_set(const TimeSeriesTable& table, const VariableCatalog& catalog,
                                          const VariableFits& fits) {
  const auto ranges = table.unit_ranges();
  TimeSeriesTable out = table;
  for (const auto& e : catalog.entries()) {
    std::vector<double> col(table.rows(), kMissing);
    for (const auto& r : ranges) {
      const auto months = detail::unit_months(table, r);
      auto s = detail::intermediate(table, r, e);
      const auto key = std::make_pair(r.unit, e.name);
      switch (e.transform) {
        case Transform::None: break;
        case Transform::RelativeRange: {
          auto it = fits.relative_range.find(key);
          if (it == fits.relative_range.end()) throw DataError("no relative-range fit for " + e.name + " in unit " + r.unit);
          try {
            s = relative_range(s, months, it->second);
          } catch (const DataError& err) {
            throw DataError(e.name + " (unit " + r.unit + "): " + err.what());
          }
          break;
        }
        case Transform::GammaStandardized:
        case Transform::LogLogisticStandardized: {
          auto it = fits.standardized.find(key);
          if (it == fits.standardized.end()) throw DataError("no standardized fit for " + e.name + " in unit " + r.unit);
          s = it->second.apply(s, months);
          break;
        }
      }
      std::copy(s.begin(), s.end(), col.begin() + static_cast<std::ptrdiff_t>(r.begin));
    }
    out = out.with_column(e.name, std::move(col));
  }
  return out;
}

// Lineage strings for the catalog as resolved against `table`; dekadal
// variables built from the monthly fallback are flagged as aliases.
inline std::vector<std::pair<std::string, std::string>> resolve_lineage(const TimeSeriesTable& table,
                                                                        const VariableCatalog& catalog) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : catalog.entries()) {
    auto lineage = e.lineage();
    if (!table.has_column(e.base) && !e.fallback_base.empty() && table.has_column(e.fallback_base)) {
      auto alias = e;
      alias.base = e.fallback_base;
      lineage = alias.lineage() + " [monthly alias of " + e.base + "]";
    }
    out.emplace_back(e.name, lineage);
  }
  return out;
}

}  // namespace droughtens::indices
