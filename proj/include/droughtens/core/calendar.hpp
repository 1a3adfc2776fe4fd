#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "droughtens/core/errors.hpp"

namespace droughtens {

struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  // Months since year 0; consecutive calendar months differ by one.
  constexpr int index() const { return year * 12 + (month - 1); }

  static constexpr YearMonth from_index(int idx) {
    return YearMonth{idx / 12, idx % 12 + 1};
  }

  constexpr YearMonth plus(int months) const { return from_index(index() + months); }

  // Zero-based calendar slot (January = 0).
  constexpr int slot() const { return month - 1; }

  friend constexpr auto operator<=>(const YearMonth&, const YearMonth&) = default;

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
  }

  // Accepts YYYY-MM.
  static YearMonth parse(std::string_view text) {
    auto fail = [&] { return DataError("unparseable date '" + std::string(text) + "' (expected YYYY-MM)"); };
    if (text.size() != 7 || text[4] != '-') throw fail();
    YearMonth ym;
    auto r1 = std::from_chars(text.data(), text.data() + 4, ym.year);
    auto r2 = std::from_chars(text.data() + 5, text.data() + 7, ym.month);
    if (r1.ec != std::errc{} || r1.ptr != text.data() + 4 || r2.ec != std::errc{} ||
        r2.ptr != text.data() + 7 || ym.month < 1 || ym.month > 12) {
      throw fail();
    }
    return ym;
  }
};

constexpr int months_between(YearMonth from, YearMonth to) { return to.index() - from.index(); }

}  // namespace droughtens
