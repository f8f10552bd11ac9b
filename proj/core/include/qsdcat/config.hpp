#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qsdcat/hilbert.hpp"
#include "qsdcat/model.hpp"
#include "qsdcat/qsd.hpp"
#include "qsdcat/wavelet.hpp"

namespace qsdcat {

enum class SpinPreparation { Cat, Coherent };

struct InitialStateParams {
  Complex alpha{5.0, 0.0};
  Complex z{1.0, 0.0};
  SpinPreparation spin = SpinPreparation::Cat;
  CatParity parity = CatParity::Minus;

  double nbar() const { return std::norm(alpha); }
  bool operator==(const InitialStateParams&) const = default;
};

struct SpaceParams {
  int n_max = 75;
  Representation representation = Representation::Symmetric;
  std::size_t max_dimension = SpaceSpec::kDefaultMaxDimension;

  bool operator==(const SpaceParams&) const = default;
};

struct AnalysisParams {
  double envelope_window = 0.0;  // 0 selects 2 t_R
  double node_threshold = 0.25;  // fraction of the band-power maximum

  bool operator==(const AnalysisParams&) const = default;
};

struct OutputParams {
  std::string directory = "qsdcat-out";
  std::string prefix = "trajectory";

  bool operator==(const OutputParams&) const = default;
};

/// Complete experiment description. Values are concrete after parse_config:
/// every derived default has been filled in.
struct SimConfig {
  ModelParams model;
  InitialStateParams initial;
  SpaceParams space;
  MeasurementParams measurement;
  IntegrationParams integration;
  int n_trajectories = 1;
  int workers = 0;  // 0 selects hardware concurrency
  WaveletParams wavelet;
  AnalysisParams analysis;
  OutputParams output;

  SpaceSpec space_spec() const;
  Timescales timescales() const;
  double envelope_window() const;

  /// Throws ConfigError naming the first violated `section.key`.
  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

/// Command-line overrides applied before derived defaults are resolved.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;
  std::optional<int> trajectories;
  std::optional<std::string> output_directory;
};

/// Parses a YAML document with sections model, space, measurement,
/// integration, wavelet, analysis, output. Unknown keys are rejected.
SimConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Emits every field explicitly; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& config);

/// Default time step: t_R / 500 for gamma = 0, else min(t_R / 2000, 2.5e-6 / (gamma (nbar + N))).
double default_time_step(const ModelParams& model, double nbar, double gamma);

/// Help text listing every key and its default.
std::string config_reference();

}  // namespace qsdcat
