#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "droughtens/core/calendar.hpp"
#include "droughtens/core/errors.hpp"
#include "droughtens/core/table.hpp"

namespace droughtens::indices {

enum class Slotting { Global, PerCalendarMonth };

// Historical extremes of one series: a single slot (GLOBAL) or one slot per
// calendar month. Fitted on the in-sample window only.
struct RelativeRangeParams {
  Slotting slotting = Slotting::PerCalendarMonth;
  std::vector<double> reference_min;
  std::vector<double> reference_max;

  std::size_t slot_of(YearMonth m) const {
    return slotting == Slotting::Global ? 0 : static_cast<std::size_t>(m.slot());
  }
};

inline RelativeRangeParams fit_relative_range(std::span<const double> values, std::span<const YearMonth> months,
                                              Slotting slotting) {
  if (values.size() != months.size()) throw DataError("values and months differ in length");
  const std::size_t slots = slotting == Slotting::Global ? 1 : 12;
  RelativeRangeParams p;
  p.slotting = slotting;
  p.reference_min.assign(slots, std::numeric_limits<double>::infinity());
  p.reference_max.assign(slots, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (is_missing(values[i])) continue;
    const auto s = p.slot_of(months[i]);
    p.reference_min[s] = std::min(p.reference_min[s], values[i]);
    p.reference_max[s] = std::max(p.reference_max[s], values[i]);
  }
  return p;
}

inline RelativeRangeParams fit_relative_range(std::span<const double> values) {
  std::vector<YearMonth> months(values.size());
  return fit_relative_range(values, months, Slotting::Global);
}

// 100 * (X - MIN) / (MAX - MIN). Not clamped: values outside the fitted
// extremes fall below 0 or above 100.
inline std::vector<double> relative_range(std::span<const double> values, std::span<const YearMonth> months,
                                          const RelativeRangeParams& p) {
  if (values.size() != months.size()) throw DataError("values and months differ in length");
  std::vector<double> out(values.size(), kMissing);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (is_missing(values[i])) continue;
    const auto s = p.slot_of(months[i]);
    const double lo = p.reference_min.at(s), hi = p.reference_max.at(s);
    if (!(hi > lo)) {
      const std::string slot = p.slotting == Slotting::Global ? "global" : "calendar month " + std::to_string(s + 1);
      throw DataError("degenerate relative range (max == min or no fit data) for " + slot);
    }
    out[i] = 100.0 * (values[i] - lo) / (hi - lo);
  }
  return out;
}

inline std::vector<double> relative_range(std::span<const double> values, const RelativeRangeParams& p) {
  if (p.slotting != Slotting::Global) throw ConfigError("calendar-slotted relative range needs months");
  std::vector<YearMonth> months(values.size());
  return relative_range(values, months, p);
}

}  // namespace droughtens::indices
