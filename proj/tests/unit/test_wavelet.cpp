#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qsdcat/errors.hpp"
#include "qsdcat/wavelet.hpp"
#include "reference.hpp"

using namespace qsdcat;

namespace {

std::vector<double> times(double dt, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = dt * static_cast<double>(i);
  return t;
}

std::vector<double> bursts(const std::vector<double>& t, std::initializer_list<double> centers,
                           double width) {
  std::vector<double> x(t.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (double c : centers) x[i] += std::exp(-0.5 * (t[i] - c) * (t[i] - c) / (width * width));
  }
  return x;
}

WaveletParams raw_params() {
  WaveletParams p;
  p.detrend = false;
  return p;
}

}  // namespace

TEST(Morlet, Values) {
  EXPECT_NEAR(morlet(0.0, 6.0).real(), std::pow(std::numbers::pi, -0.25), 1e-15);
  EXPECT_NEAR(morlet(0.0, 6.0).real(), 0.7511, 1e-4);
  for (double t : {0.1, 0.7, 1.9, 3.3}) {
    EXPECT_DOUBLE_EQ(std::abs(morlet(t, 6.0)), std::abs(morlet(-t, 6.0)));
  }
  double integral = 0.0;
  const double h = 1e-3;
  for (int k = -8000; k <= 8000; ++k) {
    const double w = (k == -8000 || k == 8000) ? 0.5 : 1.0;
    integral += w * std::norm(morlet(k * h, 6.0)) * h;
  }
  EXPECT_NEAR(integral, 1.0, 1e-6);
  EXPECT_NEAR(morlet_center_frequency(6.0), (6.0 + std::sqrt(38.0)) / (4.0 * std::numbers::pi), 1e-15);
}

TEST(Params, Validation) {
  WaveletParams p;
  EXPECT_NO_THROW(p.validate());
  p.omega0 = 4.0;
  EXPECT_THROW(p.validate(), ParameterError);
  p = WaveletParams{};
  p.n_scales = 7;
  EXPECT_THROW(p.validate(), ParameterError);
  p = WaveletParams{};
  p.scale_min = 10.0;
  p.scale_max = 5.0;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(ScaleGrid, LogSpacedDefault) {
  const auto s = scale_grid(WaveletParams{}, 4096);
  ASSERT_EQ(s.size(), 64u);
  EXPECT_DOUBLE_EQ(s.front(), 2.0);
  EXPECT_DOUBLE_EQ(s.back(), 1024.0);
  for (std::size_t i = 2; i < s.size(); ++i) {
    EXPECT_NEAR(s[i] / s[i - 1], s[1] / s[0], 1e-12);
  }
}

TEST(Cwt, MatchesDirectSum) {
  const double dt = 0.05;
  const auto t = times(dt, 300);
  std::vector<double> x(t.size());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(1.7 * t[i]) + 0.3 * nd(rng);
  const auto params = raw_params();
  const auto w = cwt_coefficients(x, dt, params);
  const auto scales = scale_grid(params, x.size());
  for (std::size_t i : {std::size_t{0}, std::size_t{20}, std::size_t{45}, std::size_t{63}}) {
    const auto row = ref::naive_cwt_row(x, dt, scales[i] * dt, params.omega0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      EXPECT_NEAR(std::abs(w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - row[j]),
                  0.0, 1e-10);
    }
  }
}

TEST(Cwt, CosineRidgeAtCenterFrequencyScale) {
  const double dt = 0.01;
  const std::size_t n = 4096;
  const auto t = times(dt, n);
  for (double f : {0.5, 1.1, 2.3}) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2 * std::numbers::pi * f * t[i]);
    const auto spec = cwt(x, dt, WaveletParams{});
    const Eigen::Index mid = static_cast<Eigen::Index>(n / 2);
    Eigen::Index best = 0;
    spec.power.col(mid).maxCoeff(&best);
    const double expected = morlet_center_frequency(6.0) / f;
    const double bin = std::log(spec.scales[1] / spec.scales[0]);
    EXPECT_LE(std::abs(std::log(spec.scales[best] / expected)), bin) << f;
  }
}

TEST(Cwt, ZeroSignalAndNormalization) {
  const std::vector<double> zero(256, 0.0);
  const auto z = cwt(zero, 0.1, WaveletParams{});
  EXPECT_EQ(z.power.maxCoeff(), 0.0);
  EXPECT_EQ(z.power.minCoeff(), 0.0);

  const auto t = times(0.1, 256);
  const auto s = cwt(bursts(t, {8.0, 17.0}, 1.0), 0.1, WaveletParams{});
  EXPECT_EQ(s.power.maxCoeff(), 1.0);
  EXPECT_GE(s.power.minCoeff(), 0.0);
  EXPECT_EQ(s.power.rows(), 64);
  EXPECT_EQ(s.power.cols(), 256);
}

TEST(Cwt, Linear) {
  const auto t = times(0.02, 512);
  const auto x = bursts(t, {3.0}, 0.5);
  std::vector<double> y(t.size()), xy(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    y[i] = std::cos(5.0 * t[i]) + 0.1 * t[i];
    xy[i] = x[i] + y[i];
  }
  const WaveletParams p;  // detrending is linear too
  const Eigen::MatrixXcd diff = cwt_coefficients(xy, 0.02, p) - cwt_coefficients(x, 0.02, p) -
                    cwt_coefficients(y, 0.02, p);
  EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Cwt, ShortSignalRejected) {
  EXPECT_THROW(cwt(std::vector<double>(15, 1.0), 0.1, WaveletParams{}), ParameterError);
  EXPECT_THROW(cwt(std::vector<double>{}, 0.1, WaveletParams{}), ParameterError);
}

TEST(Cwt, TimeShiftCovariance) {
  const double dt = 0.05;
  const auto t = times(dt, 1024);
  const std::size_t k = 37;
  const auto x = bursts(t, {20.0}, 0.8);
  const auto y = bursts(t, {20.0 + k * dt}, 0.8);
  auto p = raw_params();
  p.scale_max = 64.0;
  const auto a = cwt(x, dt, p), b = cwt(y, dt, p);
  // Edge region: the widest kernel reaches 8 * 64 samples.
  for (Eigen::Index s = 0; s < a.power.rows(); ++s) {
    for (Eigen::Index j = 100; j + k + 100 < 1024; ++j) {
      EXPECT_NEAR(b.power(s, j + static_cast<Eigen::Index>(k)), a.power(s, j), 1e-12);
    }
  }
}

TEST(Cwt, WhiteNoiseHasNoPersistentRidge) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  std::vector<double> x(4096);
  for (double& v : x) v = nd(rng);
  auto p = WaveletParams{};
  p.scale_max = 128.0;
  const auto spec = cwt(x, 1.0, p);
  std::vector<double> avg(static_cast<std::size_t>(spec.power.rows()));
  for (Eigen::Index s = 0; s < spec.power.rows(); ++s) avg[s] = spec.power.row(s).mean();
  std::vector<double> sorted = avg;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  EXPECT_LT(*std::max_element(avg.begin(), avg.end()), 3.0 * median);
}

TEST(BandPower, Basics) {
  WaveletSpectrum s;
  s.scales = {1.0, 2.0, 4.0, 8.0};
  s.times = {0.0, 1.0, 2.0};
  s.power = Eigen::MatrixXd::Ones(4, 3);
  for (double v : band_power(s, 1.5, 8.0)) EXPECT_DOUBLE_EQ(v, 1.0);

  s.power << 0.0, 0.2, 0.4,  //
      1.0, 1.0, 1.0,          //
      0.1, 0.0, 0.3,          //
      0.5, 0.6, 0.1;
  const auto all = band_power(s, 1.0, 8.0);
  for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(all[c], s.power.col(c).mean());
  EXPECT_THROW(band_power(s, 2.5, 3.5), ParameterError);
}

TEST(BandPower, RidgeOutsideBand) {
  const double dt = 0.01;
  const auto t = times(dt, 4096);
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::cos(2 * std::numbers::pi * 3.0 * t[i]);
  const auto spec = cwt(x, dt, WaveletParams{});
  // Ridge at about 0.32 time units; band an octave and more above it.
  for (double v : band_power(spec, 1.5, 8.0)) EXPECT_LT(v, 0.1);
}

TEST(Nodes, ThreeBursts) {
  const double dt = 0.01;
  const auto t = times(dt, 801);
  const auto band = bursts(t, {2.0, 4.0, 6.0}, 0.3);
  const auto nodes = detect_nodes(band, t, 0.25, 1.0);
  ASSERT_EQ(nodes.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(nodes[i], 2.0 * (i + 1), dt + 1e-12);
}

TEST(Nodes, SeparationAndThreshold) {
  const double dt = 0.01;
  const auto t = times(dt, 801);
  const auto band = bursts(t, {2.0, 2.6, 6.0}, 0.15);
  EXPECT_EQ(detect_nodes(band, t, 0.25, 1.0).size(), 2u);
  EXPECT_EQ(detect_nodes(band, t, 0.25, 0.5).size(), 3u);

  const std::vector<double> flat(t.size(), 0.7);
  EXPECT_LE(detect_nodes(flat, t, 0.5, 1.0).size(), 1u);
  EXPECT_THROW(detect_nodes(flat, t, 0.0, 1.0), ParameterError);
  EXPECT_THROW(detect_nodes(flat, t, 1.0, 1.0), ParameterError);
}
