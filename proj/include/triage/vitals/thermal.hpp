#pragma once

#include "triage/vitals/series.hpp"
#include "triage/vitals/spectral.hpp"

namespace triage::vitals {

struct ThermalParams {
  double baseline_window{5.0};
  double motion_threshold{3.0};
  double conf_min{0.5};
  double smooth_window{0.5};
  double min_spacing{1.6};
  /// Base prominence fraction, raised when pose confidence is low.
  double prominence{0.3};
  /// Peak amplitude floor in ROI intensity units.
  double amplitude_floor{0.5};
  double q_min{kRespiratoryQualityMin};
  BandSpec band{kRespiratoryBand};
};

struct ThermalEstimate {
  /// Mean rate over peak intervals that contain no gated frame.
  RateEstimate averaged;
  /// Rate from the last peak interval.
  double instantaneous_bpm{0.0};
  double gated_fraction{0.0};
  double amplitude{0.0};
  bool stable{false};
};

/// Gates frames on keypoint motion and pose confidence, subtracts a centered
/// moving-average baseline, smooths and detects breaths.
/// Throws InsufficientStableFrames when fewer than half the frames pass.
ThermalEstimate estimate_rr_thermal(const ThermalRoiTrace& trace, const ThermalParams& params = {});

}  // namespace triage::vitals
