// Acceptance criteria runner. Prints one PASS/FAIL line per criterion.
//
//   acceptance [--criterion N]... [--work-dir DIR]
//
// Without --criterion every criterion runs. Exit status is 0 only if all pass.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qsdcat/errors.hpp"
#include "qsdcat/oracle.hpp"
#include "qsdcat/pipeline.hpp"
#include "reference.hpp"

using namespace qsdcat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

fs::path g_work_dir = fs::temp_directory_path() / "qsdcat_acceptance";

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

SimConfig jc_config() {
  return parse_config(
      "model: {n_qubits: 1, alpha: 3.1622776601683795, z: 0.0, spin_state: coherent}\n"
      "space: {n_max: 50}\n");
}

SimConfig five_qubit_config(double gamma = 0.0) {
  ConfigOverrides o;
  o.gamma = gamma;
  return parse_config("model: {n_qubits: 5, alpha: 5.0, z: 1.0, parity: minus}\n"
                      "space: {representation: symmetric}\n",
                      o);
}

SimConfig ensemble_config() {
  return parse_config(
      "model: {n_qubits: 2, alpha: 2.0}\nspace: {n_max: 20}\nmeasurement: {gamma: 0.005}\n"
      "integration: {trajectories: 200}\n");
}

const std::vector<double> kSweep{0.5e-5, 0.5e-4, 0.5e-3, 0.5e-2};

// --- 1 ---------------------------------------------------------------------

Outcome jc_regression() {
  auto config = jc_config();
  config.integration.t_final = config.timescales().revival;
  const auto r = run_trajectory(config);
  const auto pe = jc_analytic_pe(10.0, 1.0, r.times);
  double worst = 0.0;
  for (std::size_t i = 0; i < pe.size(); ++i) {
    worst = std::max(worst, std::abs(1.0 - r.p_all_ground[i] - pe[i]));
  }
  return {worst < 1e-3, fmt("max |P_e - jc_analytic_pe| over [0, t_r] = %.3e (< 1e-3)", worst)};
}

// --- 2 ---------------------------------------------------------------------

RevivalStats five_qubit_revival(const TrajectoryResult& r, const SimConfig& config) {
  return revival_stats(envelope_metric(r.times, r.p_all_ground, config.envelope_window()),
                       config.timescales());
}

Outcome collapse_revival() {
  const auto config = five_qubit_config();
  const auto stats = five_qubit_revival(run_trajectory(config), config);
  const double t_r1 = 2.0 * std::numbers::pi;
  const bool timing = std::abs(stats.revival_time - t_r1) <= 0.1 * t_r1;
  const bool collapse = stats.collapse_floor < 0.2 * stats.initial_amplitude;
  return {timing && collapse,
          fmt("revival_time = %.4f (2pi +/- 10%%: [%.4f, %.4f]); collapse_floor = %.3e vs "
              "0.2 x initial %.3e",
              stats.revival_time, 0.9 * t_r1, 1.1 * t_r1, stats.collapse_floor,
              0.2 * stats.initial_amplitude)};
}

// --- 3 ---------------------------------------------------------------------

Outcome unraveling_vs_master_equation() {
  const auto config = ensemble_config();
  ValidationOptions o;
  o.seed = config.integration.seed;
  o.trajectories = config.n_trajectories;
  const auto check = lindblad_ensemble_check(o);
  return {check.passed, fmt("max |mean - lindblad| / (3 SE) = %.3f (<= 1); %s", check.measured,
                            check.detail.c_str())};
}

// --- 4 ---------------------------------------------------------------------

Outcome numerical_hygiene() {
  double post = 0.0, drift = 0.0;
  std::string guard = "never fired";
  bool guard_ok = true;
  auto track = [&](const SimConfig& c) {
    try {
      const auto r = run_trajectory(c);
      post = std::max(post, r.max_renormalized_error);
      drift = std::max(drift, *std::max_element(r.norm_drift.begin(), r.norm_drift.end()));
      return r;
    } catch (const TruncationError& e) {
      guard_ok = false;
      guard = std::string("fired: ") + e.what();
      throw;
    }
  };

  try {
    auto jc = jc_config();
    jc.integration.t_final = jc.timescales().revival;
    track(jc);
    track(five_qubit_config());
    auto ens = ensemble_config();
    for (int i = 0; i < ens.n_trajectories; ++i) {
      ens.integration.trajectory_index = static_cast<std::uint64_t>(i);
      track(ens);
    }
    for (double gamma : kSweep) track(five_qubit_config(gamma));
  } catch (const TruncationError&) {
    return {false, "Fock-leakage guard " + guard};
  }

  // Step halving at fixed sample times.
  auto coarse = five_qubit_config();
  auto fine = coarse;
  fine.integration.dt /= 2.0;
  fine.integration.output_stride *= 2;
  const auto a = run_trajectory(coarse);
  const auto b = run_trajectory(fine);
  double halving = 0.0;
  for (std::size_t i = 0; i < std::min(a.times.size(), b.times.size()); ++i) {
    halving = std::max(halving, std::abs(a.p_all_ground[i] - b.p_all_ground[i]));
  }

  const bool ok = post < 1e-12 && drift < 1e-4 && guard_ok && halving < 1e-4;
  return {ok, fmt("post-renorm max err %.2e (< 1e-12); pre-renorm drift %.2e (< 1e-4); guard %s; "
                  "step-halving max |dp| %.2e (< 1e-4)",
                  post, drift, guard.c_str(), halving)};
}

// --- 5 ---------------------------------------------------------------------

Outcome wavelet_correctness() {
  const double dt = 0.01;
  const std::size_t n = 4096;
  bool ridge_ok = true;
  std::string ridge;
  for (double f : {0.3, 0.8, 2.0}) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2 * std::numbers::pi * f * i * dt);
    const auto spec = cwt(x, dt, WaveletParams{});
    Eigen::Index best = 0;
    spec.power.col(static_cast<Eigen::Index>(n / 2)).maxCoeff(&best);
    const double expected = morlet_center_frequency(6.0) / f;
    const double bins = std::abs(std::log(spec.scales[best] / expected)) /
                        std::log(spec.scales[1] / spec.scales[0]);
    ridge_ok &= bins <= 1.0;
    ridge += fmt(" f=%.1f:%.2fbin", f, bins);
  }

  // Three Gaussian bursts through the whole chain: cwt, band power, nodes.
  std::vector<double> t(801), x(801);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = i * dt;
    for (double c : {2.0, 4.0, 6.0}) x[i] += std::exp(-0.5 * (t[i] - c) * (t[i] - c) / 0.09);
  }
  WaveletParams p;
  p.detrend = false;
  const auto spec = cwt(x, dt, p);
  const auto band = band_power(spec, 0.1, 0.6);
  const auto nodes = detect_nodes(band, t, 0.25, 1.0);
  bool nodes_ok = nodes.size() == 3;
  for (std::size_t i = 0; nodes_ok && i < 3; ++i) {
    nodes_ok = std::abs(nodes[i] - 2.0 * (i + 1)) <= dt + 1e-12;
  }
  std::string found;
  for (double v : nodes) found += fmt(" %.2f", v);
  return {ridge_ok && nodes_ok,
          fmt("ridge offset within one bin:%s; burst nodes at [%s ] (expect 2, 4, 6 +/- %.2f)",
              ridge.c_str(), found.c_str(), dt)};
}

// --- 6 ---------------------------------------------------------------------

Outcome signature_detection() {
  const auto config = five_qubit_config();
  const auto r = run_trajectory(config);
  const auto analysis = analyze_record(r.times, r.record, config);
  std::string found;
  for (double v : analysis.node_times) found += fmt(" %.3f", v);
  return {analysis.node_times.size() >= 3,
          fmt("%zu low-band nodes over [0, t_r1] at [%s ] (need >= 3); band [%.3f, %.3f]",
              analysis.node_times.size(), found.c_str(), analysis.band.first,
              analysis.band.second)};
}

// --- 7 and 8 -----------------------------------------------------------------

struct SweepPoint {
  double gamma;
  double revival_amplitude;
  std::size_t nodes;
};

std::vector<SweepPoint> run_sweep(const fs::path& root) {
  std::vector<SweepPoint> out;
  for (double gamma : kSweep) {
    ConfigOverrides o;
    o.gamma = gamma;
    o.output_directory = (root / fmt("gamma_%.0e", gamma)).string();
    const auto config =
        parse_config("model: {n_qubits: 5, alpha: 5.0, z: 1.0, parity: minus}\n", o);
    const auto sim = run_simulate(config);
    if (!sim.complete()) throw Error("sweep run failed: " + sim.trajectories.front().error);
    const auto analysis =
        run_analyze(sim.trajectories.front().file, std::nullopt, config.output.directory);
    if (!analysis.revival) throw Error("revival statistics unavailable");
    out.push_back({gamma, analysis.revival->revival_amplitude, analysis.analysis.node_times.size()});
  }
  return out;
}

Outcome gamma_sweep_trend() {
  const auto points = run_sweep(g_work_dir / "criterion_7");
  bool monotone = true;
  for (std::size_t i = 1; i < points.size(); ++i) {
    monotone &= points[i].revival_amplitude <= points[i - 1].revival_amplitude;
  }
  const bool nodes = points[2].nodes >= points[0].nodes && points[2].nodes >= points[3].nodes;
  std::string table;
  for (const auto& p : points) {
    table += fmt(" [G=%.1e amp=%.5f nodes=%zu]", p.gamma, p.revival_amplitude, p.nodes);
  }
  return {monotone && nodes, fmt("amplitude non-increasing: %s; nodes(5e-4) >= nodes(5e-6), "
                                 "nodes(5e-3): %s;%s",
                                 monotone ? "yes" : "no", nodes ? "yes" : "no", table.c_str())};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_text_file(e.path());
  }
  return files;
}

Outcome determinism() {
  const auto root = g_work_dir / "criterion_8";
  fs::remove_all(root);
  run_sweep(root);
  const auto first = snapshot(root);
  fs::remove_all(root);
  run_sweep(root);
  const auto second = snapshot(root);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    if (it == second.end() || it->second != bytes) ++differing;
  }
  const bool same = differing == 0 && first.size() == second.size() && !first.empty();
  return {same, fmt("%zu files compared, %zu differ", first.size(), differing)};
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>> kCriteria{
    {1, {"JC regression", jc_regression}},
    {2, {"collapse/revival", collapse_revival}},
    {3, {"unraveling vs master equation", unraveling_vs_master_equation}},
    {4, {"numerical hygiene", numerical_hygiene}},
    {5, {"wavelet correctness", wavelet_correctness}},
    {6, {"signature detection", signature_detection}},
    {7, {"gamma-sweep trend", gamma_sweep_trend}},
    {8, {"determinism", determinism}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (arg == "--work-dir" && i + 1 < argc) {
      g_work_dir = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]... [--work-dir DIR]\n");
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& [id, entry] : kCriteria) selected.push_back(id);
  }

  bool all = true;
  for (int id : selected) {
    const auto it = kCriteria.find(id);
    if (it == kCriteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    Outcome outcome;
    try {
      outcome = it->second.second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    all &= outcome.passed;
    std::printf("%s criterion %d (%s): %s\n", outcome.passed ? "PASS" : "FAIL", id,
                it->second.first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
