#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qsdcat/hilbert.hpp"
#include "qsdcat/model.hpp"

namespace qsdcat {

struct WaveletParams {
  double omega0 = 6.0;    // Morlet central frequency
  int n_scales = 64;      // logarithmically spaced
  double scale_min = 2.0; // in sampling intervals
  double scale_max = 0.0; // in sampling intervals; 0 selects n_samples / 4
  bool detrend = true;    // subtract a least-squares line before transforming

  void validate() const;
  bool operator==(const WaveletParams&) const = default;
};

/// |W(a, b)|^2 normalized so the global maximum is 1 (all zeros for a zero signal).
/// `scales` are in time units (sampling intervals x dt_sample); power is n_scales x n_samples.
struct WaveletSpectrum {
  std::vector<double> scales;
  std::vector<double> times;
  Eigen::MatrixXd power;
};

/// pi^{-1/4} e^{i omega0 t} e^{-t^2/2}.
Complex morlet(double t, double omega0);

/// Frequency f_c = (omega0 + sqrt(2 + omega0^2)) / (4 pi) at which a unit-scale Morlet
/// has peak power; scale a maps to pseudo-frequency f_c / a.
double morlet_center_frequency(double omega0);

/// The scale grid, in sampling intervals, that cwt() uses for a signal of `n_samples`.
std::vector<double> scale_grid(const WaveletParams& params, std::size_t n_samples);

/// Raw coefficients W(a, b) = a^{-1/2} sum_k x_k conj(psi((t_k - b)/a)) dt for each scale.
/// Linear convolution evaluated with zero-padded FFTs; optional detrend applied first.
Eigen::MatrixXcd cwt_coefficients(std::span<const double> signal, double dt_sample,
                                  const WaveletParams& params);

WaveletSpectrum cwt(std::span<const double> signal, double dt_sample, const WaveletParams& params,
                    double t0 = 0.0);

/// Mean power over scales inside [a_lo, a_hi] (time units), per time sample.
std::vector<double> band_power(const WaveletSpectrum& spectrum, double a_lo, double a_hi);

/// Scales (time units) whose pseudo-frequencies lie in [1/t_r1, 1/t_c].
std::pair<double, double> low_frequency_band(const Timescales& ts, double omega0);

/// Interior local maxima above threshold_frac x max, kept greedily from the
/// tallest down so that any two are at least `min_separation` apart. Time order.
std::vector<std::size_t> detect_node_indices(std::span<const double> band,
                                             std::span<const double> times,
                                             double threshold_frac, double min_separation);

std::vector<double> detect_nodes(std::span<const double> band, std::span<const double> times,
                                 double threshold_frac, double min_separation);

}  // namespace qsdcat
