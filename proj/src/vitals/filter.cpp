#include "triage/vitals/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/QR>
#include <unsupported/Eigen/FFT>

namespace triage::vitals {

namespace {

// Detrend degree grows with the number of low-band cycles in the window so
// that the polynomial stays well below f_lo.
constexpr double kDetrendCycles = 0.3;

Eigen::MatrixXd legendre_basis(Eigen::Index n, int degree) {
  Eigen::MatrixXd v(n, degree + 1);
  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
  v.col(0).setOnes();
  if (degree >= 1) {
    v.col(1) = u;
  }
  for (int k = 2; k <= degree; ++k) {
    v.col(k) = ((2.0 * k - 1.0) * u.cwiseProduct(v.col(k - 1)) - (k - 1.0) * v.col(k - 2)) / k;
  }
  return v;
}

}  // namespace

void check_band(const BandSpec& band, double fs) {
  if (!(band.f_lo > 0.0) || !(band.f_hi > band.f_lo)) {
    throw VitalsError(VitalsErrc::BandInvalid, "band needs 0 < f_lo < f_hi");
  }
  if (!(band.f_hi < 0.5 * fs)) {
    throw VitalsError(VitalsErrc::BandInvalid, "f_hi must lie below the Nyquist frequency");
  }
}

double band_mask(double f, const BandSpec& band) {
  const double w = 0.1 * band.f_lo;
  if (f >= band.f_lo && f <= band.f_hi) {
    return 1.0;
  }
  if (f >= band.f_lo - w && f < band.f_lo) {
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (band.f_lo - f) / w));
  }
  if (f > band.f_hi && f <= band.f_hi + w) {
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (f - band.f_hi) / w));
  }
  return 0.0;
}

Eigen::VectorXd remove_polynomial(const Eigen::VectorXd& x, int degree) {
  const Eigen::MatrixXd v = legendre_basis(x.size(), degree);
  const Eigen::VectorXd coef = v.householderQr().solve(x);
  return x - v * coef;
}

Eigen::VectorXd centered_moving_average(const Eigen::VectorXd& x, Eigen::Index half_window) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd csum(n + 1);
  csum[0] = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    csum[i + 1] = csum[i] + x[i];
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index h = std::min({half_window, i, n - 1 - i});
    out[i] = (csum[i + h + 1] - csum[i - h]) / static_cast<double>(2 * h + 1);
  }
  return out;
}

SampleSeries bandpass(const SampleSeries& s, const BandSpec& band) {
  const SampleSeries u = resample_uniform(s);
  const double fs = u.sample_rate_hint;
  check_band(band, fs);

  const Eigen::Index n = u.size();
  const double span = static_cast<double>(n) / fs;
  const int degree =
      std::max(1, static_cast<int>(std::floor(std::numbers::pi * kDetrendCycles * band.f_lo * span)));
  const Eigen::VectorXd x = remove_polynomial(u.values, std::min<int>(degree, static_cast<int>(n) - 2));

  // mirrored pads of length n with a raised-cosine fade towards the outer ends
  const Eigen::Index pad = n;
  const Eigen::Index total = 3 * n;
  std::vector<double> y(static_cast<std::size_t>(total));
  for (Eigen::Index i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(pad + i)] = x[i];
  }
  for (Eigen::Index k = 1; k <= pad; ++k) {
    const Eigen::Index kk = std::min(k, n - 1);
    const double taper = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(pad)));
    y[static_cast<std::size_t>(pad - k)] = x[kk] * taper;
    y[static_cast<std::size_t>(pad + n - 1 + k)] = x[n - 1 - kk] * taper;
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, y);
  const auto m = static_cast<Eigen::Index>(spec.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    // bin k and its mirror m - k share the same physical frequency
    const Eigen::Index kf = std::min(k, m - k);
    spec[static_cast<std::size_t>(k)] *= band_mask(static_cast<double>(kf) * fs / static_cast<double>(m), band);
  }
  std::vector<double> z;
  fft.inv(z, spec);

  SampleSeries out;
  out.timestamps = u.timestamps;
  out.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = z[static_cast<std::size_t>(pad + i)];
  }
  out.sample_rate_hint = fs;
  return out;
}

}  // namespace triage::vitals
