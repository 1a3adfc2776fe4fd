#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "droughtens/core/calendar.hpp"
#include "droughtens/core/errors.hpp"
#include "droughtens/core/table.hpp"

namespace droughtens::indices {

enum class Distribution { Gamma, LogLogistic };

inline constexpr double kStandardizedClamp = 3.5;

// Mixed zero/gamma model for SPI: H(x) = q + (1 - q) * G(x; shape, scale).
struct GammaParams {
  double zero_probability = 0.0;
  double shape = 1.0;
  double scale = 1.0;

  double cdf(double x) const {
    if (x <= 0.0) return zero_probability;
    return zero_probability + (1.0 - zero_probability) * boost::math::gamma_p(shape, x / scale);
  }
};

// Three-parameter log-logistic for SPEI: F(x) = 1 / (1 + (scale / (x - location))^shape).
// Three-parameter log-logistic in Hosking's generalized-logistic form:
// F(x) = 1 / (1 + exp(-y)), y = -ln(1 - shape (x - location) / scale) / shape.
// shape = -tau3 (L-skewness); shape < 0 is the classic right-skewed case with
// exponent -1/shape, and shape > 0 admits left-skewed months.
struct LogLogisticParams {
  double location = 0.0;
  double scale = 1.0;
  double shape = -0.5;

  double cdf(double x) const {
    double y = (x - location) / scale;
    if (std::abs(shape) > 1e-9) {
      const double arg = 1.0 - shape * y;
      if (arg <= 0.0) return shape > 0.0 ? 1.0 : 0.0;
      y = -std::log(arg) / shape;
    }
    return 1.0 / (1.0 + std::exp(-y));
  }
};

struct SpiFit {
  Distribution distribution = Distribution::Gamma;
  bool per_calendar_month = true;
  std::vector<GammaParams> gamma;              // one per slot (Gamma)
  std::vector<LogLogisticParams> loglogistic;  // one per slot (LogLogistic)

  std::size_t slot_of(YearMonth m) const { return per_calendar_month ? static_cast<std::size_t>(m.slot()) : 0; }

  double cdf(double x, YearMonth m) const {
    const auto s = slot_of(m);
    return distribution == Distribution::Gamma ? gamma.at(s).cdf(x) : loglogistic.at(s).cdf(x);
  }

  // Phi^-1(H(x)), clamped to +-3.5.
  double transform(double x, YearMonth m) const {
    if (is_missing(x)) return kMissing;
    static const boost::math::normal standard;
    static const double lo = boost::math::cdf(standard, -kStandardizedClamp);
    static const double hi = boost::math::cdf(standard, kStandardizedClamp);
    const double h = cdf(x, m);
    if (h <= lo) return -kStandardizedClamp;
    if (h >= hi) return kStandardizedClamp;
    return boost::math::quantile(standard, h);
  }

  std::vector<double> apply(std::span<const double> values, std::span<const YearMonth> months) const {
    if (values.size() != months.size()) throw DataError("values and months differ in length");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = transform(values[i], months[i]);
    return out;
  }
};

namespace detail {

inline std::string slot_label(bool per_month, std::size_t slot) {
  return per_month ? "calendar month " + std::to_string(slot + 1) : "all months";
}

// Maximum-likelihood gamma on the positive values plus the zero fraction.
inline GammaParams fit_gamma(const std::vector<double>& sample, const std::string& where) {
  std::vector<double> pos;
  for (double v : sample) {
    if (v < 0.0) throw DataError("negative value in gamma-standardized series (" + where + ")");
    if (v > 0.0) pos.push_back(v);
  }
  if (pos.empty()) throw DataError("all-zero series cannot be standardized (" + where + ")");
  if (pos.size() < 3) throw DataError("too few positive values to fit a gamma distribution (" + where + ")");
  double sum = 0.0, sum_log = 0.0;
  for (double v : pos) {
    sum += v;
    sum_log += std::log(v);
  }
  const double n = static_cast<double>(pos.size());
  const double mean = sum / n;
  const double a = std::log(mean) - sum_log / n;
  if (!(a > 1e-10)) throw DataError("degenerate gamma fit: constant values (" + where + ")");

  double shape = (1.0 + std::sqrt(1.0 + 4.0 * a / 3.0)) / (4.0 * a);
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(shape) - boost::math::digamma(shape) - a;
    const double df = 1.0 / shape - boost::math::trigamma(shape);
    double next = shape - f / df;
    if (next <= 0.0) next = 0.5 * shape;
    const bool done = std::abs(next - shape) < 1e-12 * shape;
    shape = next;
    if (done) break;
  }
  if (!std::isfinite(shape) || shape <= 0.0) throw NumericalError("gamma shape fit diverged (" + where + ")");

  GammaParams g;
  g.zero_probability = static_cast<double>(sample.size() - pos.size()) / static_cast<double>(sample.size());
  g.shape = shape;
  g.scale = mean / shape;
  return g;
}

// Unbiased probability-weighted moments w_s = (1/N) sum_i C(N-i, s)/C(N-1, s) x_(i),
// x ascending, followed by the log-logistic moment equations.
inline LogLogisticParams fit_loglogistic(std::vector<double> sample, const std::string& where) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double w0 = 0.0, w1 = 0.0, w2 = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double i = static_cast<double>(k + 1);
    const double c1 = (n - i) / (n - 1.0);
    const double c2 = (n - i) * (n - i - 1.0) / ((n - 1.0) * (n - 2.0));
    w0 += sample[k];
    w1 += c1 * sample[k];
    w2 += c2 * sample[k];
  }
  w0 /= n;
  w1 /= n;
  w2 /= n;
  // L-moments from the unbiased PWMs.
  const double l1 = w0, l2 = w0 - 2.0 * w1, l3 = w0 - 6.0 * w1 + 6.0 * w2;
  if (!(l2 > 1e-12 * (1.0 + std::abs(l1)))) throw NumericalError("log-logistic PWM fit diverged: no spread (" + where + ")");
  const double k = -l3 / l2;
  if (!std::isfinite(k) || std::abs(k) >= 1.0) {
    throw NumericalError("log-logistic PWM fit diverged: |L-skewness| >= 1 (" + where + ")");
  }
  LogLogisticParams p;
  p.shape = k;
  if (std::abs(k) <= 1e-9) {
    p.scale = l2;
    p.location = l1;
  } else {
    const double pk = std::numbers::pi * k;
    p.scale = l2 * std::sin(pk) / pk;
    p.location = l1 - p.scale * (1.0 / k - std::numbers::pi / std::sin(pk));
  }
  if (!std::isfinite(p.scale) || p.scale <= 0.0 || !std::isfinite(p.location)) {
    throw NumericalError("log-logistic PWM fit diverged (" + where + ")");
  }
  return p;
}

}  // namespace detail

struct StandardizedResult {
  SpiFit fit;
  std::vector<double> transformed;
};

// Fits on every non-missing value given (callers pass the in-sample window)
// and returns the fit together with the transformed input.
inline StandardizedResult fit_standardized_index(std::span<const double> values, std::span<const YearMonth> months,
                                                 Distribution distribution, bool per_calendar_month,
                                                 int min_observations = 10) {
  if (values.size() != months.size()) throw DataError("values and months differ in length");
  const std::size_t slots = per_calendar_month ? 12 : 1;
  std::vector<std::vector<double>> by_slot(slots);
  SpiFit fit;
  fit.distribution = distribution;
  fit.per_calendar_month = per_calendar_month;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!is_missing(values[i])) by_slot[fit.slot_of(months[i])].push_back(values[i]);
  }
  for (std::size_t s = 0; s < slots; ++s) {
    const auto where = detail::slot_label(per_calendar_month, s);
    if (by_slot[s].size() < static_cast<std::size_t>(std::max(min_observations, 3))) {
      throw DataError("too few observations (" + std::to_string(by_slot[s].size()) + ") to standardize " + where);
    }
    if (distribution == Distribution::Gamma) {
      fit.gamma.push_back(detail::fit_gamma(by_slot[s], where));
    } else {
      fit.loglogistic.push_back(detail::fit_loglogistic(by_slot[s], where));
    }
  }
  StandardizedResult out{fit, fit.apply(values, months)};
  return out;
}

inline StandardizedResult fit_standardized_index(std::span<const double> values, Distribution distribution,
                                                 int min_observations = 10) {
  std::vector<YearMonth> months(values.size());
  return fit_standardized_index(values, months, distribution, false, min_observations);
}

}  // namespace droughtens::indices
