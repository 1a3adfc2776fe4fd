#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "droughtens/core/calendar.hpp"
#include "droughtens/core/errors.hpp"
#include "droughtens/core/hash.hpp"
#include "droughtens/core/table.hpp"

namespace droughtens {

struct SyntheticConfig {
  int units = 4;
  int months = 204;  // Mar 2001 .. Feb 2018
  std::uint64_t seed = 0;
  YearMonth start{2001, 3};
  double rain_cv = 0.35;         // multiplicative monthly rainfall noise
  double chirps_cv = 0.30;       // extra noise of the second rainfall source
  double ndvi_noise = 0.012;     // observation noise on each dekadal NDVI value
  double lst_noise = 0.8;        // Kelvin
  double rain_coupling = 1.0;    // strength of the rainfall -> vegetation response
  bool second_rain_source = true;
};

inline constexpr int kMinSyntheticMonths = 48;

// Monthly base series per unit: RFE (mm), CHIRPS_RFE (mm), LST (K), EVT and
// PET (mm/month), NDVI (monthly mean of three dekads) and NDVI_DEKAD (last
// dekad of the month). Vegetation integrates lagged rainfall, so NDVI trails
// precipitation by about a month.
inline TimeSeriesTable generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.months < kMinSyntheticMonths) {
    throw ConfigError("synthetic series need at least " + std::to_string(kMinSyntheticMonths) + " months");
  }
  if (cfg.units < 1) throw ConfigError("synthetic config needs at least one unit");

  std::vector<std::string> names = {"NDVI", "NDVI_DEKAD", "RFE", "LST", "EVT", "PET"};
  if (cfg.second_rain_source) names.push_back("CHIRPS_RFE");
  std::vector<RowKey> keys;
  std::vector<std::vector<double>> cols(names.size());

  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int u = 0; u < cfg.units; ++u) {
    const std::string unit = "u" + std::to_string(u + 1);
    std::mt19937_64 rng(derive_seed(cfg.seed, "synthetic", unit, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double rain_shape = 1.0 / (cfg.rain_cv * cfg.rain_cv);
    std::gamma_distribution<double> rain_noise(rain_shape, 1.0 / rain_shape);
    const double chirps_shape = 1.0 / (cfg.chirps_cv * cfg.chirps_cv);
    std::gamma_distribution<double> chirps_noise(chirps_shape, 1.0 / chirps_shape);

    const double rain_scale = 45.0 + 15.0 * u;
    const double lst_base = 301.0 + 1.5 * u;
    const double ndvi_lo = 0.15 + 0.02 * u;
    const double ndvi_hi = 0.62 + 0.03 * u;

    double climate = 0.0;      // slowly varying wet/dry regime
    double lst_anomaly = 0.0;  // heat anomaly independent of rainfall
    double veg = 0.5;          // vegetation state in [0, 1]
    double recent_rain[3] = {0.0, 0.0, 0.0};

    for (int m = 0; m < cfg.months; ++m) {
      const YearMonth ym = cfg.start.plus(m);
      const double s = static_cast<double>(ym.slot());
      // Bimodal rains peaking in April and November.
      const double season = 0.12 + std::exp(-0.5 * (s - 3.0) * (s - 3.0) / 0.8) +
                            0.8 * std::exp(-0.5 * (s - 10.0) * (s - 10.0) / 0.8);
      climate = 0.9 * climate + 0.35 * normal(rng);
      double rain = rain_scale * season * std::exp(0.9 * climate) * rain_noise(rng);
      if (season < 0.3 && uniform(rng) < 0.04) rain = 0.0;

      lst_anomaly = 0.6 * lst_anomaly + cfg.lst_noise * normal(rng);
      const double lst = lst_base + 2.5 * std::cos(two_pi * (s - 1.0) / 12.0) -
                         0.015 * (rain - rain_scale * season) + lst_anomaly;
      const double pet = 110.0 + 25.0 * std::cos(two_pi * (s - 1.0) / 12.0) + 2.0 * (lst - lst_base) +
                         4.0 * normal(rng);

      // Dekadal vegetation response to rainfall of the preceding dekads.
      double ndvi_sum = 0.0, ndvi_last = 0.0;
      for (int d = 0; d < 3; ++d) {
        const double lagged = (recent_rain[0] + recent_rain[1] + recent_rain[2]) / 3.0;
        const double wetness = lagged / (lagged + 0.6 * rain_scale / 3.0);
        const double target = std::clamp(cfg.rain_coupling * (1.35 * wetness - 0.1) - 0.035 * lst_anomaly, 0.0, 1.0);
        veg = 0.82 * veg + 0.18 * target;
        const double ndvi = ndvi_lo + (ndvi_hi - ndvi_lo) * veg + cfg.ndvi_noise * normal(rng);
        ndvi_sum += ndvi;
        ndvi_last = ndvi;
        recent_rain[0] = recent_rain[1];
        recent_rain[1] = recent_rain[2];
        recent_rain[2] = rain / 3.0;
      }
      const double ndvi_month = ndvi_sum / 3.0;
      const double evt = std::min(rain, pet) * 0.45 + 40.0 * veg + 3.0 * normal(rng);

      keys.push_back({unit, ym});
      std::size_t c = 0;
      cols[c++].push_back(ndvi_month);
      cols[c++].push_back(ndvi_last);
      cols[c++].push_back(rain);
      cols[c++].push_back(lst);
      cols[c++].push_back(std::max(evt, 0.0));
      cols[c++].push_back(pet);
      if (cfg.second_rain_source) cols[c++].push_back(rain * chirps_noise(rng));
    }
  }
  return TimeSeriesTable::build(std::move(keys), std::move(names), std::move(cols));
}

}  // namespace droughtens
