#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qsdcat/config.hpp"
#include "qsdcat/errors.hpp"
#include "qsdcat/pipeline.hpp"

namespace {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalAbort = 3,
  kValidationFailure = 4,
};

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;
  std::optional<int> trajectories;
  std::optional<std::string> out;
  std::string record_file;
};

qsdcat::SimConfig load_config(const Options& opt) {
  qsdcat::ConfigOverrides overrides{opt.seed, opt.gamma, opt.trajectories, opt.out};
  const std::string text =
      opt.config_path.empty() ? std::string{} : qsdcat::read_text_file(opt.config_path);
  return qsdcat::parse_config(text, overrides);
}

int simulate(const Options& opt) {
  const auto config = load_config(opt);
  const auto summary = qsdcat::run_simulate(config);
  for (const auto& t : summary.trajectories) {
    if (t.failure != qsdcat::FailureKind::None) {
      std::cerr << "trajectory " << t.index << " failed: " << t.error << "\n";
    }
  }
  std::cout << "wrote " << summary.manifest_file.string() << "\n";
  if (summary.numerical_abort()) return kNumericalAbort;
  return summary.complete() ? kSuccess : kFailure;
}

int analyze(const Options& opt) {
  std::optional<qsdcat::SimConfig> config;
  if (!opt.config_path.empty()) config = load_config(opt);
  const std::filesystem::path out =
      opt.out ? std::filesystem::path(*opt.out)
              : std::filesystem::path(opt.record_file).parent_path();
  const auto summary = qsdcat::run_analyze(opt.record_file, config, out);
  std::cout << "nodes: " << summary.analysis.node_times.size() << "\n";
  for (double t : summary.analysis.node_times) std::cout << "  t=" << t << "\n";
  std::cout << "wrote " << summary.spectrum_file.string() << "\n"
            << "wrote " << summary.node_file.string() << "\n";
  return kSuccess;
}

int validate(const Options& opt) {
  qsdcat::ValidationOptions v;
  if (opt.seed) v.seed = *opt.seed;
  if (opt.trajectories) v.trajectories = *opt.trajectories;
  const auto report = qsdcat::run_validate(v);
  std::cout << report.format();
  return report.passed() ? kSuccess : kValidationFailure;
}

int timescales(const Options& opt) {
  std::cout << qsdcat::timescales_table(load_config(opt));
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum state diffusion of a cavity field coupled to N qubits"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 2 config or input error, 3 numerical-guard abort, "
             "4 validation failure.\n\n" +
             qsdcat::config_reference());

  Options opt;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "YAML config document")->check(CLI::ExistingFile);
  };
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "master seed (overrides integration.seed)");
    cmd->add_option("--gamma", opt.gamma, "measurement strength (overrides measurement.gamma)");
    cmd->add_option("--trajectories", opt.trajectories, "number of trajectories");
  };

  auto* sim = app.add_subcommand("simulate", "integrate trajectories and write time series");
  add_config(sim);
  add_run_flags(sim);
  sim->add_option("--out", opt.out, "output directory (overrides output.directory)");

  auto* ana = app.add_subcommand("analyze", "wavelet spectrum and node report of a record file");
  ana->add_option("record", opt.record_file, "time-series CSV")->required();
  add_config(ana);
  ana->add_option("--out", opt.out, "output directory (default: next to the record)");

  auto* val = app.add_subcommand("validate", "run the oracle checks");
  val->add_option("--seed", opt.seed, "master seed for the ensemble check");
  val->add_option("--trajectories", opt.trajectories, "ensemble size (default 200)");

  auto* ts = app.add_subcommand("timescales", "print timescales and derived defaults");
  add_config(ts);
  add_run_flags(ts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*sim) return simulate(opt);
    if (*ana) return analyze(opt);
    if (*val) return validate(opt);
    return timescales(opt);
  } catch (const qsdcat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const qsdcat::FormatError& e) {
    std::cerr << "format error at byte " << e.byte_offset() << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const qsdcat::NumericalGuardError& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
