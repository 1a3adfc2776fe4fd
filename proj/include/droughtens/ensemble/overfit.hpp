#pragma once

namespace droughtens::ensemble {

inline constexpr double kDefaultOverfitTolerance = 0.03;

struct OverfitAssessment {
  double index = 0.0;  // validation R^2 - training R^2
  bool is_overfit = false;
};

// Overfit when training R^2 exceeds validation R^2 by more than the tolerance.
inline OverfitAssessment overfit_index(double r2_train, double r2_val,
                                       double tolerance = kDefaultOverfitTolerance) {
  // The 1e-12 slack keeps decimal inputs such as (0.90, 0.87) on the right side of the cut.
  return {r2_val - r2_train, r2_train - r2_val > tolerance + 1e-12};
}

}  // namespace droughtens::ensemble
