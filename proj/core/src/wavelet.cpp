#include "qsdcat/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "qsdcat/errors.hpp"

namespace qsdcat {

namespace {

constexpr std::size_t kMinSignalLength = 16;
// Morlet envelope e^{-u^2/2} is below 1e-14 past |u| = 8.
constexpr double kSupportHalfWidth = 8.0;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> remove_linear_trend(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  double sum_k = 0.0, sum_x = 0.0, sum_kk = 0.0, sum_kx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto kk = static_cast<double>(k);
    sum_k += kk;
    sum_x += x[k];
    sum_kk += kk * kk;
    sum_kx += kk * x[k];
  }
  const double slope = (n * sum_kx - sum_k * sum_x) / (n * sum_kk - sum_k * sum_k);
  const double intercept = (sum_x - slope * sum_k) / n;
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = x[k] - (intercept + slope * static_cast<double>(k));
  }
  return out;
}

}  // namespace

void WaveletParams::validate() const {
  if (!(omega0 >= 5.0)) throw ParameterError("wavelet.omega0 must be >= 5");
  if (n_scales < 8) throw ParameterError("wavelet.n_scales must be >= 8");
  if (!(scale_min > 0.0)) throw ParameterError("wavelet.scale_min must be > 0");
  if (scale_max != 0.0 && !(scale_max > scale_min)) {
    throw ParameterError("wavelet.scale_max must exceed wavelet.scale_min");
  }
}

Complex morlet(double t, double omega0) {
  static const double norm = std::pow(std::numbers::pi, -0.25);
  return norm * std::exp(-0.5 * t * t) * std::polar(1.0, omega0 * t);
}

double morlet_center_frequency(double omega0) {
  return (omega0 + std::sqrt(2.0 + omega0 * omega0)) / (4.0 * std::numbers::pi);
}

std::vector<double> scale_grid(const WaveletParams& params, std::size_t n_samples) {
  params.validate();
  const double lo = params.scale_min;
  const double hi = params.scale_max > 0.0 ? params.scale_max : static_cast<double>(n_samples) / 4.0;
  if (!(hi > lo)) {
    throw ParameterError("scale grid is empty: scale_max " + std::to_string(hi) +
                         " <= scale_min " + std::to_string(lo));
  }
  std::vector<double> scales(static_cast<std::size_t>(params.n_scales));
  const double ratio = std::log(hi / lo) / (params.n_scales - 1);
  for (int i = 0; i < params.n_scales; ++i) scales[i] = lo * std::exp(ratio * i);
  scales.back() = hi;
  return scales;
}

Eigen::MatrixXcd cwt_coefficients(std::span<const double> signal, double dt_sample,
                                  const WaveletParams& params) {
  if (signal.size() < kMinSignalLength) {
    throw ParameterError("cwt needs at least " + std::to_string(kMinSignalLength) +
                         " samples, got " + std::to_string(signal.size()));
  }
  if (!(dt_sample > 0.0)) throw ParameterError("cwt needs a positive sampling interval");
  const std::size_t n = signal.size();
  const auto scales = scale_grid(params, n);

  std::vector<double> x = params.detrend ? remove_linear_trend(signal)
                                         : std::vector<double>(signal.begin(), signal.end());

  const auto max_half =
      static_cast<std::size_t>(std::ceil(kSupportHalfWidth * scales.back()));
  const std::size_t fft_len = next_pow2(n + std::min(max_half, n - 1) + 1);

  Eigen::FFT<double> fft;
  std::vector<Complex> padded(fft_len, Complex(0.0));
  for (std::size_t k = 0; k < n; ++k) padded[k] = x[k];
  std::vector<Complex> x_hat;
  fft.fwd(x_hat, padded);

  Eigen::MatrixXcd out(static_cast<Eigen::Index>(scales.size()), static_cast<Eigen::Index>(n));
  std::vector<Complex> kernel(fft_len);
  std::vector<Complex> kernel_hat;
  std::vector<Complex> product(fft_len);
  std::vector<Complex> conv;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double a = scales[i];
    const double weight = dt_sample / std::sqrt(a * dt_sample);
    const auto half = std::min(static_cast<std::size_t>(std::ceil(kSupportHalfWidth * a)), n - 1);
    // W_m = sum_k x_k c_{m-k} with c_j = a^{-1/2} dt conj(psi(-j / a)).
    std::fill(kernel.begin(), kernel.end(), Complex(0.0));
    for (std::size_t j = 0; j <= half; ++j) {
      const double u = static_cast<double>(j) / a;
      kernel[j] = weight * std::conj(morlet(-u, params.omega0));
      if (j > 0) kernel[fft_len - j] = weight * std::conj(morlet(u, params.omega0));
    }
    fft.fwd(kernel_hat, kernel);
    for (std::size_t k = 0; k < fft_len; ++k) product[k] = x_hat[k] * kernel_hat[k];
    fft.inv(conv, product);
    for (std::size_t m = 0; m < n; ++m) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = conv[m];
    }
  }
  return out;
}

WaveletSpectrum cwt(std::span<const double> signal, double dt_sample, const WaveletParams& params,
                    double t0) {
  const Eigen::MatrixXcd coeffs = cwt_coefficients(signal, dt_sample, params);
  WaveletSpectrum spectrum;
  for (double a : scale_grid(params, signal.size())) spectrum.scales.push_back(a * dt_sample);
  spectrum.times.resize(signal.size());
  for (std::size_t k = 0; k < signal.size(); ++k) {
    spectrum.times[k] = t0 + static_cast<double>(k) * dt_sample;
  }
  spectrum.power = coeffs.cwiseAbs2();
  const double peak = spectrum.power.maxCoeff();
  if (peak > 0.0) {
    spectrum.power /= peak;
  } else {
    spectrum.power.setZero();
  }
  return spectrum;
}

std::vector<double> band_power(const WaveletSpectrum& spectrum, double a_lo, double a_hi) {
  if (!(a_hi >= a_lo)) throw ParameterError("band_power needs a_lo <= a_hi");
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < spectrum.scales.size(); ++i) {
    if (spectrum.scales[i] >= a_lo && spectrum.scales[i] <= a_hi) {
      rows.push_back(static_cast<Eigen::Index>(i));
    }
  }
  if (rows.empty()) {
    throw ParameterError("scale band [" + std::to_string(a_lo) + ", " + std::to_string(a_hi) +
                         "] contains no scales of the spectrum");
  }
  std::vector<double> out(static_cast<std::size_t>(spectrum.power.cols()), 0.0);
  for (Eigen::Index row : rows) {
    for (Eigen::Index c = 0; c < spectrum.power.cols(); ++c) {
      out[static_cast<std::size_t>(c)] += spectrum.power(row, c);
    }
  }
  for (double& v : out) v /= static_cast<double>(rows.size());
  return out;
}

std::pair<double, double> low_frequency_band(const Timescales& ts, double omega0) {
  const double fc = morlet_center_frequency(omega0);
  return {fc * ts.collapse, fc * ts.first_revival};
}

std::vector<std::size_t> detect_node_indices(std::span<const double> band,
                                             std::span<const double> times,
                                             double threshold_frac, double min_separation) {
  if (!(threshold_frac > 0.0 && threshold_frac < 1.0)) {
    throw ParameterError("threshold_frac must lie in (0, 1)");
  }
  if (band.size() != times.size()) throw ParameterError("band and times differ in length");
  if (band.size() < 3) return {};
  const double peak = *std::max_element(band.begin(), band.end());
  if (!(peak > 0.0)) return {};
  const double floor = threshold_frac * peak;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < band.size(); ++i) {
    if (band[i] > band[i - 1] && band[i] >= band[i + 1] && band[i] >= floor) {
      candidates.push_back(i);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return band[a] > band[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t c : candidates) {
    const bool isolated = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return std::abs(times[c] - times[k]) >= min_separation;
    });
    if (isolated) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<double> detect_nodes(std::span<const double> band, std::span<const double> times,
                                 double threshold_frac, double min_separation) {
  std::vector<double> out;
  for (std::size_t i : detect_node_indices(band, times, threshold_frac, min_separation)) {
    out.push_back(times[i]);
  }
  return out;
}

}  // namespace qsdcat
