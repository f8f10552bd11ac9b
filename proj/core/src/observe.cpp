#include "qsdcat/observe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qsdcat/errors.hpp"

namespace qsdcat {

namespace {

void require_normalized(const StateVector& state) {
  if (!state.is_normalized()) throw StructuralError("observable requires a normalized state");
}

}  // namespace

double p_all_ground(const StateVector& state) {
  require_normalized(state);
  const auto& space = state.space();
  const auto& psi = state.amplitudes();
  double p = 0.0;
  for (std::size_t n = 0; n < space.field_dim(); ++n) {
    p += std::norm(psi(static_cast<Eigen::Index>(space.index(n, 0))));
  }
  return std::clamp(p, 0.0, 1.0);
}

Complex field_amplitude(const StateVector& state) {
  require_normalized(state);
  const auto& space = state.space();
  const auto& psi = state.amplitudes();
  Complex a{0.0, 0.0};
  for (std::size_t n = 0; n + 1 < space.field_dim(); ++n) {
    const double amp = std::sqrt(static_cast<double>(n + 1));
    for (std::size_t s = 0; s < space.spin_dim(); ++s) {
      a += amp * std::conj(psi(static_cast<Eigen::Index>(space.index(n, s)))) *
           psi(static_cast<Eigen::Index>(space.index(n + 1, s)));
    }
  }
  return a;
}

double q_expectation(const StateVector& state) {
  return std::numbers::sqrt2 * field_amplitude(state).real();
}

double photon_number(const StateVector& state) {
  require_normalized(state);
  const auto& space = state.space();
  const auto& psi = state.amplitudes();
  double total = 0.0;
  for (std::size_t n = 0; n < space.field_dim(); ++n) {
    double shell = 0.0;
    for (std::size_t s = 0; s < space.spin_dim(); ++s) {
      shell += std::norm(psi(static_cast<Eigen::Index>(space.index(n, s))));
    }
    total += static_cast<double>(n) * shell;
  }
  return total;
}

double spin_projection(const StateVector& state) {
  require_normalized(state);
  const auto& space = state.space();
  const auto& psi = state.amplitudes();
  double total = 0.0;
  for (std::size_t s = 0; s < space.spin_dim(); ++s) {
    double weight = 0.0;
    for (std::size_t n = 0; n < space.field_dim(); ++n) {
      weight += std::norm(psi(static_cast<Eigen::Index>(space.index(n, s))));
    }
    total += space.spin_projection(s) * weight;
  }
  return total;
}

EnvelopeMetric envelope_metric(std::span<const double> times, std::span<const double> series,
                               double window) {
  if (times.size() != series.size()) throw ParameterError("times and series differ in length");
  if (times.size() < 2) throw ParameterError("envelope needs at least two samples");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ParameterError("times must be increasing");
  const auto half = static_cast<std::size_t>(std::lround(0.5 * window / dt));
  if (half < 1) {
    throw ParameterError("envelope window " + std::to_string(window) +
                         " is shorter than two samples");
  }
  if (2 * half + 1 > series.size()) throw ParameterError("envelope window exceeds the series");

  EnvelopeMetric metric;
  metric.window = window;
  metric.sample_interval = dt;
  const std::size_t count = series.size() - 2 * half;
  metric.centers.reserve(count);
  metric.amplitude.reserve(count);
  for (std::size_t c = half; c + half < series.size(); ++c) {
    const auto first = series.begin() + static_cast<std::ptrdiff_t>(c - half);
    const auto last = series.begin() + static_cast<std::ptrdiff_t>(c + half + 1);
    const auto [lo, hi] = std::minmax_element(first, last);
    metric.centers.push_back(times[c]);
    metric.amplitude.push_back(*hi - *lo);
  }
  return metric;
}

RevivalStats revival_stats(const EnvelopeMetric& metric, const Timescales& ts) {
  if (metric.centers.empty()) throw ParameterError("empty envelope metric");
  const double t_r1 = ts.first_revival;
  const double half = 0.5 * metric.window;
  const double covered_lo = metric.centers.front() - half;
  const double covered_hi = metric.centers.back() + half;
  if (covered_lo > 0.2 * t_r1 || covered_hi < 1.2 * t_r1 - metric.sample_interval) {
    throw ParameterError("envelope covers [" + std::to_string(covered_lo) + ", " +
                         std::to_string(covered_hi) + "], need [0.2, 1.2] x t_r1 = [" +
                         std::to_string(0.2 * t_r1) + ", " + std::to_string(1.2 * t_r1) + "]");
  }
  const double collapse_lo = 2.0 * ts.collapse;
  const double collapse_hi = 0.6 * t_r1;
  if (collapse_lo >= collapse_hi) {
    throw ParameterError("collapse band (2 t_c, 0.6 t_r1) is empty for these timescales");
  }

  RevivalStats stats;
  stats.initial_amplitude = metric.amplitude.front();

  // Revival: the amplitude is exactly flat while the same extreme pair stays in
  // the window, so take the middle of the first maximal run.
  std::size_t best = metric.centers.size();
  for (std::size_t i = 0; i < metric.centers.size(); ++i) {
    const double t = metric.centers[i];
    if (t <= 0.5 * t_r1 || t >= 1.2 * t_r1) continue;
    if (best == metric.centers.size() || metric.amplitude[i] > metric.amplitude[best]) best = i;
  }
  if (best == metric.centers.size()) throw ParameterError("no window centers in the revival band");
  std::size_t run_end = best;
  while (run_end + 1 < metric.centers.size() && metric.centers[run_end + 1] < 1.2 * t_r1 &&
         metric.amplitude[run_end + 1] == metric.amplitude[best]) {
    ++run_end;
  }
  const std::size_t mid = best + (run_end - best) / 2;
  stats.revival_time = metric.centers[mid];
  stats.revival_amplitude = metric.amplitude[mid];

  bool found = false;
  for (std::size_t i = 0; i < metric.centers.size(); ++i) {
    const double t = metric.centers[i];
    if (t <= collapse_lo || t >= collapse_hi) continue;
    stats.collapse_floor = found ? std::min(stats.collapse_floor, metric.amplitude[i])
                                 : metric.amplitude[i];
    found = true;
  }
  if (!found) throw ParameterError("no window centers in the collapse band");
  return stats;
}

}  // namespace qsdcat
