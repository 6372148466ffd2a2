#pragma once

#include "triage/vitals/series.hpp"

namespace triage::vitals {

/// Zero-phase band-pass by spectral masking. The series is polynomial
/// detrended, padded by tapered mirror images, masked with a raised-cosine
/// edge of width 0.1 * f_lo and cropped back to its original length.
/// Irregular series are resampled to the median rate first.
SampleSeries bandpass(const SampleSeries& s, const BandSpec& band);

/// Mask gain at frequency f.
double band_mask(double f, const BandSpec& band);

/// Throws BandInvalid unless 0 < f_lo < f_hi < fs / 2.
void check_band(const BandSpec& band, double fs);

/// Least-squares removal of Legendre polynomials up to `degree` over the
/// sample index.
Eigen::VectorXd remove_polynomial(const Eigen::VectorXd& x, int degree);

/// Centered moving average whose window shrinks symmetrically at the edges.
Eigen::VectorXd centered_moving_average(const Eigen::VectorXd& x, Eigen::Index half_window);

}  // namespace triage::vitals
