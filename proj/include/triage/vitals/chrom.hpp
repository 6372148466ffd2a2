#pragma once

#include "triage/vitals/series.hpp"

namespace triage::vitals {

/// Chrominance blood-volume pulse: X = 3Rn - 2Gn, Y = 1.5Rn + Gn - 1.5Bn on
/// mean-normalised channels, output X - (sd X / sd Y) Y with zero mean.
/// Needs at least 64 frames.
SampleSeries chrom_bvp(const RgbTrace& trace);

/// Mean-normalised green channel, zero mean.
SampleSeries green_bvp(const RgbTrace& trace);

inline constexpr Eigen::Index kChromMinFrames = 64;

}  // namespace triage::vitals
