#include "qsdcat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "qsdcat/errors.hpp"
#include "qsdcat/oracle.hpp"

namespace qsdcat {

namespace {

constexpr const char* kConfigMarker = "--- config";

std::string trajectory_file_name(const SimConfig& config, std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%04llu.csv", static_cast<unsigned long long>(index));
  return config.output.prefix + buf;
}

std::string failure_label(FailureKind kind) {
  switch (kind) {
    case FailureKind::None:
      return "ok";
    case FailureKind::Truncation:
      return "truncation";
    case FailureKind::StepSize:
      return "step_size";
    case FailureKind::Other:
      return "error";
  }
  return "error";
}

int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), jobs));
}

// Runs every trajectory of `config`; `on_done` is called from the worker that finished it.
template <typename OnDone>
void for_each_trajectory(const SimConfig& config, int workers, OnDone on_done) {
  const auto total = static_cast<std::size_t>(config.n_trajectories);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      SimConfig local = config;
      local.integration.trajectory_index = i;
      std::optional<TrajectoryResult> result;
      FailureKind failure = FailureKind::None;
      std::string error;
      try {
        result = run_trajectory(local);
      } catch (const TruncationError& e) {
        failure = FailureKind::Truncation;
        error = e.what();
      } catch (const StepSizeError& e) {
        failure = FailureKind::StepSize;
        error = e.what();
      } catch (const NumericalGuardError& e) {
        failure = FailureKind::StepSize;
        error = e.what();
      } catch (const std::exception& e) {
        failure = FailureKind::Other;
        error = e.what();
      }
      on_done(local, std::move(result), failure, std::move(error));
    }
  };
  const int n = worker_count(workers, total);
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

std::vector<std::size_t> samples_until(std::span<const double> times, double t_end) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= t_end + 1e-9 * std::max(1.0, std::abs(t_end))) keep.push_back(i);
  }
  return keep;
}

}  // namespace

bool SimulationSummary::complete() const {
  return std::all_of(trajectories.begin(), trajectories.end(),
                     [](const auto& t) { return t.failure == FailureKind::None; });
}

bool SimulationSummary::numerical_abort() const {
  return std::any_of(trajectories.begin(), trajectories.end(), [](const auto& t) {
    return t.failure == FailureKind::Truncation || t.failure == FailureKind::StepSize;
  });
}

std::vector<std::string> time_series_comments(const SimConfig& config, const std::string& role) {
  std::vector<std::string> out{"qsdcat time series", role,
                               "seed: " + std::to_string(config.integration.seed), kConfigMarker};
  std::istringstream yaml(serialize_config(config));
  for (std::string line; std::getline(yaml, line);) out.push_back(line);
  return out;
}

SimConfig config_from_comments(const std::vector<std::string>& comments) {
  const auto marker = std::find(comments.begin(), comments.end(), kConfigMarker);
  if (marker == comments.end()) {
    throw ConfigError("file header carries no config echo; pass --config");
  }
  std::string yaml;
  for (auto it = std::next(marker); it != comments.end(); ++it) yaml += *it + "\n";
  return parse_config(yaml);
}

MeanAndError ensemble_statistics(const std::vector<const std::vector<double>*>& series) {
  if (series.empty()) throw ParameterError("ensemble_statistics needs at least one series");
  const std::size_t n = series.front()->size();
  for (const auto* s : series) {
    if (s->size() != n) throw StructuralError("ensemble series differ in length");
  }
  const double m = static_cast<double>(series.size());
  MeanAndError out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto* s : series) sum += (*s)[i];
    const double mean = sum / m;
    out.mean[i] = mean;
    if (series.size() > 1) {
      double ss = 0.0;
      for (const auto* s : series) ss += ((*s)[i] - mean) * ((*s)[i] - mean);
      out.standard_error[i] = std::sqrt(ss / (m - 1.0) / m);
    }
  }
  return out;
}

SimulationSummary run_simulate(const SimConfig& config) {
  config.validate();
  namespace fs = std::filesystem;
  const fs::path dir = config.output.directory;
  fs::create_directories(dir);

  const auto total = static_cast<std::size_t>(config.n_trajectories);
  SimulationSummary summary;
  summary.trajectories.resize(total);
  summary.results.resize(total);

  // Each slot is written by exactly one worker.
  for_each_trajectory(config, config.workers,
                      [&](const SimConfig& local, std::optional<TrajectoryResult> result,
                          FailureKind failure, std::string error) {
                        const auto i = local.integration.trajectory_index;
                        auto& outcome = summary.trajectories[i];
                        outcome.index = i;
                        outcome.failure = failure;
                        outcome.error = std::move(error);
                        if (result) {
                          const fs::path file = dir / trajectory_file_name(config, i);
                          const auto comments = time_series_comments(
                              config, "trajectory_index: " + std::to_string(i));
                          write_text_file(file, format_csv(time_series_table(*result, comments)));
                          outcome.file = file;
                        }
                        summary.results[i] = std::move(result);
                      });

  std::vector<const TrajectoryResult*> ok;
  for (const auto& r : summary.results) {
    if (r) ok.push_back(&*r);
  }
  if (!ok.empty()) {
    CsvTable mean;
    mean.comments = time_series_comments(
        config, "ensemble_mean: " + std::to_string(ok.size()) + " of " + std::to_string(total));
    mean.header = kTimeSeriesHeader;
    mean.columns.push_back(ok.front()->times);
    using Member = std::vector<double> TrajectoryResult::*;
    for (Member member : {&TrajectoryResult::p_all_ground, &TrajectoryResult::q_expect,
                          &TrajectoryResult::record, &TrajectoryResult::norm_drift}) {
      std::vector<const std::vector<double>*> columns;
      for (const auto* r : ok) columns.push_back(&(r->*member));
      mean.columns.push_back(ensemble_statistics(columns).mean);
    }
    const fs::path file = dir / (config.output.prefix + "_mean.csv");
    write_text_file(file, format_csv(mean));
    summary.ensemble_file = file;
  }

  nlohmann::json manifest;
  manifest["format"] = "qsdcat-manifest-1";
  manifest["seed"] = config.integration.seed;
  manifest["n_trajectories"] = total;
  manifest["completed"] = ok.size();
  manifest["complete"] = summary.complete();
  manifest["config"] = serialize_config(config);
  manifest["ensemble_mean"] =
      summary.ensemble_file ? nlohmann::json(summary.ensemble_file->filename().string())
                            : nlohmann::json(nullptr);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& t : summary.trajectories) {
    nlohmann::json e;
    e["index"] = t.index;
    e["status"] = failure_label(t.failure);
    if (t.failure == FailureKind::None) {
      e["file"] = t.file.filename().string();
    } else {
      e["error"] = t.error;
    }
    entries.push_back(std::move(e));
  }
  manifest["trajectories"] = std::move(entries);
  summary.manifest_file = dir / "manifest.json";
  write_text_file(summary.manifest_file, manifest.dump(2) + "\n");
  return summary;
}

RecordAnalysis analyze_record(std::span<const double> times, std::span<const double> record,
                              const SimConfig& config) {
  if (times.size() != record.size()) throw StructuralError("times and record differ in length");
  if (times.size() < 2) throw ParameterError("record needs at least two samples");
  const std::size_t n = times.size();
  const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) throw ParameterError("record times must increase");
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = times.front() + static_cast<double>(i) * dt;
    if (std::abs(times[i] - expected) > 1e-6 * dt) {
      throw ParameterError("record is not uniformly sampled near t=" + std::to_string(times[i]));
    }
  }

  const Timescales ts = config.timescales();
  RecordAnalysis out;
  out.spectrum = cwt(record, dt, config.wavelet, times.front());
  out.band = low_frequency_band(ts, config.wavelet.omega0);
  out.band_power = band_power(out.spectrum, out.band.first, out.band.second);
  out.node_window_end = times.front() + ts.first_revival;

  const auto keep = samples_until(times, out.node_window_end);
  const std::span<const double> band_head(out.band_power.data(), keep.size());
  const std::span<const double> time_head(times.data(), keep.size());
  for (std::size_t i :
       detect_node_indices(band_head, time_head, config.analysis.node_threshold, 2.0 * ts.rabi)) {
    out.node_times.push_back(times[i]);
    out.node_power.push_back(out.band_power[i]);
  }
  return out;
}

AnalyzeSummary run_analyze(const std::filesystem::path& record_file,
                           const std::optional<SimConfig>& config,
                           const std::filesystem::path& out_dir) {
  const CsvTable table = parse_csv(read_text_file(record_file));
  const auto& times = table.column("t");
  const auto& record = table.column("record");
  const SimConfig cfg = config ? *config : config_from_comments(table.comments);
  cfg.validate();

  AnalyzeSummary summary;
  summary.analysis = analyze_record(times, record, cfg);
  const auto& a = summary.analysis;
  if (std::find(table.header.begin(), table.header.end(), "p_all_ground") != table.header.end()) {
    try {
      const auto metric =
          envelope_metric(times, table.column("p_all_ground"), cfg.envelope_window());
      summary.revival = revival_stats(metric, cfg.timescales());
    } catch (const Error&) {
      summary.revival.reset();
    }
  }

  std::filesystem::create_directories(out_dir);
  const std::string stem = record_file.stem().string();
  const std::string source = "source: " + record_file.filename().string();

  summary.spectrum_file = out_dir / (stem + ".spectrum.csv");
  write_text_file(summary.spectrum_file,
                  format_csv(spectrum_table(
                      a.spectrum, {"qsdcat wavelet spectrum", source,
                                   "omega0: " + format_double(cfg.wavelet.omega0),
                                   "rows: time; columns: scale (time units); power normalized "
                                   "to max 1"})));

  std::vector<std::string> comments{
      "qsdcat node report",
      source,
      "band: " + format_double(a.band.first) + " " + format_double(a.band.second),
      "window_end: " + format_double(a.node_window_end),
      "threshold: " + format_double(cfg.analysis.node_threshold),
      "count: " + std::to_string(a.node_times.size()),
  };
  if (summary.revival) {
    comments.push_back("revival_time: " + format_double(summary.revival->revival_time));
    comments.push_back("revival_amplitude: " + format_double(summary.revival->revival_amplitude));
    comments.push_back("collapse_floor: " + format_double(summary.revival->collapse_floor));
    comments.push_back("initial_amplitude: " + format_double(summary.revival->initial_amplitude));
  }
  std::vector<double> is_node(times.size(), 0.0);
  for (double t : a.node_times) {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    is_node[static_cast<std::size_t>(it - times.begin())] = 1.0;
  }
  summary.node_file = out_dir / (stem + ".nodes.csv");
  write_text_file(summary.node_file,
                  format_csv(CsvTable{comments, {"t", "band_power", "node"},
                                      {times, a.band_power, is_node}}));
  return summary;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::format() const {
  std::string out;
  for (const auto& c : checks) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s %-24s measured=%.6g allowed=%.6g", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.measured, c.allowed);
    out += buf;
    if (!c.detail.empty()) out += "  " + c.detail;
    out += "\n";
  }
  return out;
}

ValidationCheck jc_check(const ValidationOptions& options) {
  SimConfig config = parse_config(R"(
model: {n_qubits: 1, alpha: 3.1622776601683795, z: 0.0, spin_state: coherent}
space: {n_max: 50}
)");
  config.integration.t_final = config.timescales().revival;
  config.integration.seed = options.seed;
  config.validate();

  ValidationCheck check;
  check.name = "jc_analytic";
  check.allowed = 1e-3;
  try {
    std::optional<TrajectoryResult> run;
    if (options.inject_hamiltonian_sign_error) {
      const SpaceSpec space = config.space_spec();
      const auto field = build_field_ops(space);
      const auto spin = build_spin_ops(space);
      const Complex g(config.model.g, 0.0);
      const LinearOperator broken =
          g * (spin.jplus * field.annihilation) - g * (spin.jminus * field.creation);
      run = integrate_trajectory(config, broken);
    } else {
      run = run_trajectory(config);
    }
    const TrajectoryResult& result = *run;
    const auto analytic = jc_analytic_pe(config.initial.nbar(), config.model.g, result.times);
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      worst = std::max(worst, std::abs((1.0 - result.p_all_ground[i]) - analytic[i]));
    }
    check.measured = worst;
    check.passed = worst < check.allowed;
    check.detail = "max |P_e - analytic| over [0, t_r], " + std::to_string(analytic.size()) +
                   " samples";
  } catch (const std::exception& e) {
    check.measured = std::numeric_limits<double>::infinity();
    check.passed = false;
    check.detail = std::string("simulation failed: ") + e.what();
  }
  return check;
}

ValidationCheck lindblad_ensemble_check(const ValidationOptions& options) {
  ConfigOverrides overrides;
  overrides.seed = options.seed;
  overrides.trajectories = options.trajectories;
  SimConfig config = parse_config(R"(
model: {n_qubits: 2, alpha: 2.0}
space: {n_max: 20}
measurement: {gamma: 0.005}
)",
                                  overrides);
  config.workers = options.workers;

  ValidationCheck check;
  check.name = "lindblad_ensemble";
  check.allowed = 1.0;
  std::vector<std::optional<TrajectoryResult>> results(config.n_trajectories);
  std::string failure;
  for_each_trajectory(config, config.workers,
                      [&](const SimConfig& local, std::optional<TrajectoryResult> r, FailureKind,
                          std::string error) {
                        results[local.integration.trajectory_index] = std::move(r);
                        if (!error.empty()) failure = error;  // any one is enough to report
                      });
  if (!failure.empty()) {
    check.measured = std::numeric_limits<double>::infinity();
    check.detail = "trajectory failed: " + failure;
    return check;
  }

  // Lab-frame oracle on a step that divides the output interval.
  const SpaceSpec space = config.space_spec();
  const double interval = config.integration.dt * config.integration.output_stride;
  const int sub = static_cast<int>(std::ceil(interval / (config.timescales().rabi / 2000.0)));
  const double t_end = interval * static_cast<double>(results.front()->times.size() - 1);
  const auto field = build_field_ops(space);
  const auto spin = build_spin_ops(space);
  const auto rho = lindblad_evolve(
      DensityMatrix::from_pure(prepare_initial_state(config)), build_hamiltonian(config.model, space),
      Complex(std::sqrt(2.0 * config.measurement.gamma), 0.0) * field.annihilation,
      interval / sub, t_end, sub);

  double worst_ratio = 0.0, worst_dev = 0.0, max_se = 0.0;
  for (const auto& [label, member, op] :
       {std::tuple{"jz", &TrajectoryResult::jz_expect, &spin.jz},
        std::tuple{"n", &TrajectoryResult::photon_number, &field.number}}) {
    std::vector<const std::vector<double>*> series;
    for (const auto& r : results) series.push_back(&((*r).*member));
    const auto stats = ensemble_statistics(series);
    if (stats.mean.size() != rho.size()) throw StructuralError("oracle and ensemble sampling differ");
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double dev = std::abs(stats.mean[i] - rho[i].expectation(*op).real());
      const double bound = 3.0 * stats.standard_error[i] + 1e-9;
      worst_ratio = std::max(worst_ratio, dev / bound);
      worst_dev = std::max(worst_dev, dev);
      max_se = std::max(max_se, stats.standard_error[i]);
    }
    (void)label;
  }
  check.measured = worst_ratio;
  check.passed = worst_ratio <= 1.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "max |mean - oracle| / (3 SE) over Jz and n; M=%d, max dev=%.3g, max SE=%.3g",
                config.n_trajectories, worst_dev, max_se);
  check.detail = buf;
  return check;
}

ValidationCheck cross_representation_validation() {
  const SimConfig config = parse_config(R"(
model: {n_qubits: 2, alpha: 2.0}
space: {n_max: 15}
integration: {frame: lab}
)");
  ValidationCheck check;
  check.name = "cross_representation";
  check.allowed = 1e-8;
  const auto report = cross_representation_check(config);
  check.measured = std::max(
      {report.max_dev_p_all_ground, report.max_dev_jz, report.max_dev_photon_number});
  check.passed = report.passed;
  check.detail = "Full vs Symmetric, N=2, nbar=4, max |deviation| of p_all_ground, Jz, n";
  return check;
}

ValidationReport run_validate(const ValidationOptions& options) {
  ValidationReport report;
  report.checks.push_back(jc_check(options));
  report.checks.push_back(lindblad_ensemble_check(options));
  report.checks.push_back(cross_representation_validation());
  return report;
}

std::string timescales_table(const SimConfig& config) {
  const Timescales ts = config.timescales();
  const auto& ip = config.integration;
  std::string out;
  auto row = [&](const char* name, double value) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-12s %.10g\n", name, value);
    out += buf;
  };
  row("nbar", config.initial.nbar());
  row("N", config.model.n_qubits);
  row("g", config.model.g);
  row("t_R", ts.rabi);
  row("t_c", ts.collapse);
  row("t_r", ts.revival);
  row("t_r1", ts.first_revival);
  row("dt", ip.dt);
  row("t_final", ip.t_final);
  row("stride", ip.output_stride);
  row("samples", static_cast<double>(ip.sample_count()));
  return out;
}

}  // namespace qsdcat
