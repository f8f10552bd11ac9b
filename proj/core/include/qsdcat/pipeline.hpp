#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsdcat/config.hpp"
#include "qsdcat/observe.hpp"
#include "qsdcat/qsd.hpp"
#include "qsdcat/series_io.hpp"
#include "qsdcat/wavelet.hpp"

namespace qsdcat {

enum class FailureKind { None, Truncation, StepSize, Other };

struct TrajectoryOutcome {
  std::uint64_t index = 0;
  std::filesystem::path file;  // empty when the trajectory failed
  FailureKind failure = FailureKind::None;
  std::string error;
};

struct SimulationSummary {
  std::vector<TrajectoryOutcome> trajectories;
  std::vector<std::optional<TrajectoryResult>> results;  // by trajectory index
  std::optional<std::filesystem::path> ensemble_file;
  std::filesystem::path manifest_file;

  bool complete() const;
  /// True if any trajectory stopped on a numerical guard.
  bool numerical_abort() const;
};

/// Runs config.n_trajectories trajectories on up to config.workers threads and writes
/// <prefix>_NNNN.csv per trajectory, <prefix>_mean.csv and manifest.json under
/// config.output.directory. File contents depend only on the config and seed.
SimulationSummary run_simulate(const SimConfig& config);

/// Comment block that heads every time-series file.
std::vector<std::string> time_series_comments(const SimConfig& config, const std::string& role);

/// Recovers the config echoed in a time-series file header.
SimConfig config_from_comments(const std::vector<std::string>& comments);

struct MeanAndError {
  std::vector<double> mean;
  std::vector<double> standard_error;  // sample std / sqrt(M); zero for M = 1
};

/// Column-wise statistics over equally long series.
MeanAndError ensemble_statistics(const std::vector<const std::vector<double>*>& series);

struct RecordAnalysis {
  WaveletSpectrum spectrum;
  std::pair<double, double> band;  // scale band, time units
  std::vector<double> band_power;
  double node_window_end = 0.0;
  std::vector<double> node_times;
  std::vector<double> node_power;
};

/// CWT of a uniformly sampled record, low-frequency band power, and nodes over [t0, t_r1].
/// Nodes are kept at least 2 t_R apart.
RecordAnalysis analyze_record(std::span<const double> times, std::span<const double> record,
                              const SimConfig& config);

struct AnalyzeSummary {
  RecordAnalysis analysis;
  std::optional<RevivalStats> revival;
  std::filesystem::path spectrum_file;
  std::filesystem::path node_file;
};

/// Reads a time-series file, analyzes its record column and writes
/// <stem>.spectrum.csv and <stem>.nodes.csv into out_dir. Without an explicit
/// config the one echoed in the file header is used.
AnalyzeSummary run_analyze(const std::filesystem::path& record_file,
                           const std::optional<SimConfig>& config,
                           const std::filesystem::path& out_dir);

struct ValidationOptions {
  std::uint64_t seed = 1;
  int trajectories = 200;
  int workers = 0;
  /// Test hook: flips the sign of the J- a^dag coupling term in the JC check.
  bool inject_hamiltonian_sign_error = false;
};

struct ValidationCheck {
  std::string name;
  double measured = 0.0;
  double allowed = 0.0;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const;
  std::string format() const;
};

/// JC-analytic, Lindblad-ensemble and cross-representation checks.
ValidationReport run_validate(const ValidationOptions& options = {});

ValidationCheck jc_check(const ValidationOptions& options);
ValidationCheck lindblad_ensemble_check(const ValidationOptions& options);
ValidationCheck cross_representation_validation();

/// t_R, t_c, t_r, t_r1 and the derived integration defaults.
std::string timescales_table(const SimConfig& config);

}  // namespace qsdcat
