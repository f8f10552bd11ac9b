#pragma once

#include <span>
#include <vector>

#include "qsdcat/hilbert.hpp"
#include "qsdcat/model.hpp"

namespace qsdcat {

/// Probability that every qubit is in |g>, summed over the field.
double p_all_ground(const StateVector& state);

/// <a>, evaluated directly from the banded amplitude structure.
Complex field_amplitude(const StateVector& state);

/// <q> with q = (a + a^dag)/sqrt(2).
double q_expectation(const StateVector& state);

/// <a^dag a>.
double photon_number(const StateVector& state);

/// <Jz>.
double spin_projection(const StateVector& state);

/// Peak-to-peak amplitude of a sampled series inside a sliding window.
struct EnvelopeMetric {
  double window = 0.0;
  double sample_interval = 0.0;
  std::vector<double> centers;
  std::vector<double> amplitude;
};

/// Slides a window of width `window` one sample at a time over a uniformly
/// sampled series; amplitude = max - min inside each window that fits.
EnvelopeMetric envelope_metric(std::span<const double> times, std::span<const double> series,
                               double window);

struct RevivalStats {
  double revival_time = 0.0;
  double revival_amplitude = 0.0;
  double collapse_floor = 0.0;
  double initial_amplitude = 0.0;  // amplitude of the first window
};

/// Revival = argmax of the envelope over (0.5 t_r1, 1.2 t_r1), centered on a tied plateau;
/// collapse floor = minimum envelope over (2 t_c, 0.6 t_r1).
RevivalStats revival_stats(const EnvelopeMetric& metric, const Timescales& ts);

}  // namespace qsdcat
