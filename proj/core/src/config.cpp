#include "qsdcat/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qsdcat/errors.hpp"

namespace qsdcat {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"n_qubits", "omega", "g", "alpha", "z", "spin_state", "parity"}},
      {"space", {"n_max", "representation", "max_dimension"}},
      {"measurement", {"gamma", "record_mode"}},
      {"integration",
       {"dt", "t_final", "output_stride", "seed", "trajectories", "workers", "frame", "scheme"}},
      {"wavelet", {"omega0", "n_scales", "scale_min", "scale_max", "detrend"}},
      {"analysis", {"envelope_window", "node_threshold"}},
      {"output", {"directory", "prefix"}},
  };
  return keys;
}

std::string where(const YAML::Mark& mark) {
  return mark.is_null() ? std::string{} : " (line " + std::to_string(mark.line + 1) + ")";
}

// Typed accessor over one section of the document.
class Section {
 public:
  Section(std::string name, YAML::Node node) : name_(std::move(name)), node_(std::move(node)) {}

  bool has(const std::string& key) const { return node_ && node_[key]; }

  template <typename T>
  std::optional<T> get(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const YAML::Node value = node_[key];
    try {
      return value.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(name_ + "." + key + ": cannot read value '" + value.Scalar() + "'" +
                        where(value.Mark()));
    }
  }

  std::optional<Complex> get_complex(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const YAML::Node value = node_[key];
    try {
      if (value.IsSequence()) {
        if (value.size() != 2) throw ConfigError(name_ + "." + key + ": expected [re, im]");
        return Complex(value[0].as<double>(), value[1].as<double>());
      }
      return Complex(value.as<double>(), 0.0);
    } catch (const YAML::Exception&) {
      throw ConfigError(name_ + "." + key + ": expected a number or [re, im]" +
                        where(value.Mark()));
    }
  }

  template <typename E>
  std::optional<E> get_enum(const std::string& key,
                            const std::vector<std::pair<std::string, E>>& choices) const {
    const auto text = get<std::string>(key);
    if (!text) return std::nullopt;
    for (const auto& [label, value] : choices) {
      if (*text == label) return value;
    }
    std::string allowed;
    for (const auto& [label, value] : choices) allowed += (allowed.empty() ? "" : "|") + label;
    throw ConfigError(name_ + "." + key + ": '" + *text + "' is not one of " + allowed +
                      where(node_[key].Mark()));
  }

 private:
  std::string name_;
  YAML::Node node_;
};

const std::vector<std::pair<std::string, Representation>> kRepresentations{
    {"symmetric", Representation::Symmetric}, {"full", Representation::Full}};
const std::vector<std::pair<std::string, CatParity>> kParities{{"minus", CatParity::Minus},
                                                               {"plus", CatParity::Plus}};
const std::vector<std::pair<std::string, SpinPreparation>> kSpinStates{
    {"cat", SpinPreparation::Cat}, {"coherent", SpinPreparation::Coherent}};
const std::vector<std::pair<std::string, RecordMode>> kRecordModes{{"ideal", RecordMode::Ideal},
                                                                   {"noisy", RecordMode::Noisy}};
const std::vector<std::pair<std::string, Frame>> kFrames{{"interaction", Frame::Interaction},
                                                         {"lab", Frame::Lab}};
const std::vector<std::pair<std::string, StepScheme>> kSchemes{
    {"rk4", StepScheme::RungeKuttaDrift}, {"euler", StepScheme::EulerMaruyama}};

template <typename E>
std::string label_of(const std::vector<std::pair<std::string, E>>& choices, E value) {
  for (const auto& [label, v] : choices) {
    if (v == value) return label;
  }
  return "?";
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  // Keep floats recognizable as floats to YAML readers.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_complex(Complex c) {
  if (c.imag() == 0.0) return fmt_double(c.real());
  return "[" + fmt_double(c.real()) + ", " + fmt_double(c.imag()) + "]";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

void fail(const std::string& key, const std::string& message) {
  throw ConfigError(key + ": " + message);
}

}  // namespace

double default_time_step(const ModelParams& model, double nbar, double gamma) {
  const double t_rabi = timescales(model, nbar).rabi;
  if (!(gamma > 0.0)) return t_rabi / 500.0;
  // With noise the per-step norm error has a sqrt(gamma) dt^{3/2} cross term with H
  // on top of the gamma Var(a) dt term; both stay near 2e-5 under these bounds.
  return std::min(t_rabi / 2000.0, 2.5e-6 / (gamma * (nbar + model.n_qubits)));
}

SpaceSpec SimConfig::space_spec() const {
  return SpaceSpec(space.n_max, model.n_qubits, space.representation, space.max_dimension);
}

Timescales SimConfig::timescales() const { return qsdcat::timescales(model, initial.nbar()); }

double SimConfig::envelope_window() const {
  return analysis.envelope_window > 0.0 ? analysis.envelope_window : 2.0 * timescales().rabi;
}

void SimConfig::validate() const {
  if (model.n_qubits < 1) fail("model.n_qubits", "must be >= 1");
  if (!(model.g > 0.0)) fail("model.g", "must be > 0");
  if (!(model.omega >= 0.0)) fail("model.omega", "must be >= 0");
  if (!(initial.nbar() > 0.0)) fail("model.alpha", "must be nonzero (timescales need nbar > 0)");
  if (space.n_max < 1) fail("space.n_max", "must be >= 1");
  try {
    (void)space_spec();
  } catch (const Error& e) {
    fail("space.n_max", e.what());
  }
  if (!(measurement.gamma >= 0.0)) fail("measurement.gamma", "must be >= 0");
  if (measurement.gamma == 0.0 && measurement.record_mode == RecordMode::Noisy) {
    fail("measurement.record_mode", "gamma = 0 requires an ideal record");
  }

  const auto ts = timescales();
  const auto& ip = integration;
  if (!(ip.dt > 0.0)) fail("integration.dt", "must be > 0");
  if (!(2.0 * measurement.gamma * ip.dt < 0.01)) {
    fail("integration.dt", "2*gamma*dt = " + fmt_double(2.0 * measurement.gamma * ip.dt) +
                               " must be < 0.01");
  }
  if (ip.dt > ts.rabi / 200.0 * (1.0 + 1e-12)) {
    fail("integration.dt", "dt = " + fmt_double(ip.dt) + " must be <= t_R/200 = " +
                               fmt_double(ts.rabi / 200.0));
  }
  if (!(ip.t_final > 0.0)) fail("integration.t_final", "must be > 0");
  if (ip.output_stride < 1) fail("integration.output_stride", "must be >= 1");
  if (ip.t_final < ip.dt * ip.output_stride) {
    fail("integration.t_final", "shorter than one output interval");
  }
  if (n_trajectories < 1) fail("integration.trajectories", "must be >= 1");
  if (workers < 0) fail("integration.workers", "must be >= 0");

  try {
    wavelet.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (analysis.envelope_window < 0.0) fail("analysis.envelope_window", "must be >= 0");
  if (analysis.envelope_window > 0.0 && analysis.envelope_window < 2.0 * ts.rabi) {
    fail("analysis.envelope_window", "must be >= 2 t_R = " + fmt_double(2.0 * ts.rabi));
  }
  if (!(analysis.node_threshold > 0.0 && analysis.node_threshold < 1.0)) {
    fail("analysis.node_threshold", "must lie in (0, 1)");
  }
  if (output.directory.empty()) fail("output.directory", "must not be empty");
  if (output.prefix.empty()) fail("output.prefix", "must not be empty");
}

SimConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config document must be a mapping of sections");

  for (const auto& entry : root) {
    const auto name = entry.first.as<std::string>();
    const auto found = schema().find(name);
    if (found == schema().end()) {
      throw ConfigError("unknown section '" + name + "'" + where(entry.first.Mark()));
    }
    if (entry.second.IsNull()) continue;
    if (!entry.second.IsMap()) throw ConfigError("section '" + name + "' must be a mapping");
    for (const auto& kv : entry.second) {
      const auto key = kv.first.as<std::string>();
      if (!found->second.contains(key)) {
        throw ConfigError("unknown key '" + name + "." + key + "'" + where(kv.first.Mark()));
      }
    }
  }

  const Section model(std::string("model"), root["model"]);
  const Section space(std::string("space"), root["space"]);
  const Section measurement(std::string("measurement"), root["measurement"]);
  const Section integration(std::string("integration"), root["integration"]);
  const Section wavelet(std::string("wavelet"), root["wavelet"]);
  const Section analysis(std::string("analysis"), root["analysis"]);
  const Section output(std::string("output"), root["output"]);

  SimConfig c;
  c.model.n_qubits = model.get<int>("n_qubits").value_or(1);
  c.model.g = model.get<double>("g").value_or(1.0);
  c.model.omega = model.get<double>("omega").value_or(10.0 * c.model.g);
  c.initial.alpha = model.get_complex("alpha").value_or(Complex(5.0, 0.0));
  c.initial.z = model.get_complex("z").value_or(Complex(1.0, 0.0));
  c.initial.spin = model.get_enum("spin_state", kSpinStates).value_or(SpinPreparation::Cat);
  c.initial.parity = model.get_enum("parity", kParities).value_or(CatParity::Minus);

  const double nbar = c.initial.nbar();
  c.space.n_max = space.get<int>("n_max").value_or(
      std::max(default_fock_cutoff(nbar), c.model.n_qubits + 2));
  c.space.representation =
      space.get_enum("representation", kRepresentations).value_or(Representation::Symmetric);
  c.space.max_dimension =
      space.get<std::size_t>("max_dimension").value_or(SpaceSpec::kDefaultMaxDimension);

  c.measurement.gamma = overrides.gamma ? *overrides.gamma
                                        : measurement.get<double>("gamma").value_or(0.0);
  c.measurement.record_mode = measurement.get_enum("record_mode", kRecordModes)
                                  .value_or(c.measurement.gamma > 0.0 ? RecordMode::Noisy
                                                                      : RecordMode::Ideal);
  if (c.measurement.gamma == 0.0) c.measurement.record_mode = RecordMode::Ideal;

  // Derived defaults below need valid timescales.
  if (!(c.model.g > 0.0)) fail("model.g", "must be > 0");
  if (!(nbar > 0.0)) fail("model.alpha", "must be nonzero (timescales need nbar > 0)");
  if (c.model.n_qubits < 1) fail("model.n_qubits", "must be >= 1");
  const auto ts = qsdcat::timescales(c.model, nbar);

  auto& ip = c.integration;
  ip.dt = integration.get<double>("dt").value_or(
      default_time_step(c.model, nbar, c.measurement.gamma));
  ip.t_final = integration.get<double>("t_final").value_or(1.2 * ts.first_revival);
  ip.output_stride = integration.get<int>("output_stride")
                         .value_or(std::max(1, static_cast<int>(std::lround(
                                                   ip.t_final / ip.dt / 4000.0))));
  ip.seed = overrides.seed ? *overrides.seed : integration.get<std::uint64_t>("seed").value_or(1);
  ip.frame = integration.get_enum("frame", kFrames).value_or(Frame::Interaction);
  ip.scheme = integration.get_enum("scheme", kSchemes).value_or(StepScheme::RungeKuttaDrift);
  c.n_trajectories = overrides.trajectories ? *overrides.trajectories
                                            : integration.get<int>("trajectories").value_or(1);
  c.workers = integration.get<int>("workers").value_or(0);

  c.wavelet.omega0 = wavelet.get<double>("omega0").value_or(6.0);
  c.wavelet.n_scales = wavelet.get<int>("n_scales").value_or(64);
  c.wavelet.scale_min = wavelet.get<double>("scale_min").value_or(2.0);
  c.wavelet.scale_max = wavelet.get<double>("scale_max").value_or(0.0);
  c.wavelet.detrend = wavelet.get<bool>("detrend").value_or(true);

  c.analysis.envelope_window = analysis.get<double>("envelope_window").value_or(0.0);
  c.analysis.node_threshold = analysis.get<double>("node_threshold").value_or(0.25);

  c.output.directory = overrides.output_directory
                           ? *overrides.output_directory
                           : output.get<std::string>("directory").value_or("qsdcat-out");
  c.output.prefix = output.get<std::string>("prefix").value_or("trajectory");

  c.validate();
  return c;
}

std::string serialize_config(const SimConfig& c) {
  std::ostringstream out;
  out << "model:\n"
      << "  n_qubits: " << c.model.n_qubits << "\n"
      << "  omega: " << fmt_double(c.model.omega) << "\n"
      << "  g: " << fmt_double(c.model.g) << "\n"
      << "  alpha: " << fmt_complex(c.initial.alpha) << "\n"
      << "  z: " << fmt_complex(c.initial.z) << "\n"
      << "  spin_state: " << label_of(kSpinStates, c.initial.spin) << "\n"
      << "  parity: " << label_of(kParities, c.initial.parity) << "\n"
      << "space:\n"
      << "  n_max: " << c.space.n_max << "\n"
      << "  representation: " << label_of(kRepresentations, c.space.representation) << "\n"
      << "  max_dimension: " << c.space.max_dimension << "\n"
      << "measurement:\n"
      << "  gamma: " << fmt_double(c.measurement.gamma) << "\n"
      << "  record_mode: " << label_of(kRecordModes, c.measurement.record_mode) << "\n"
      << "integration:\n"
      << "  dt: " << fmt_double(c.integration.dt) << "\n"
      << "  t_final: " << fmt_double(c.integration.t_final) << "\n"
      << "  output_stride: " << c.integration.output_stride << "\n"
      << "  seed: " << c.integration.seed << "\n"
      << "  trajectories: " << c.n_trajectories << "\n"
      << "  workers: " << c.workers << "\n"
      << "  frame: " << label_of(kFrames, c.integration.frame) << "\n"
      << "  scheme: " << label_of(kSchemes, c.integration.scheme) << "\n"
      << "wavelet:\n"
      << "  omega0: " << fmt_double(c.wavelet.omega0) << "\n"
      << "  n_scales: " << c.wavelet.n_scales << "\n"
      << "  scale_min: " << fmt_double(c.wavelet.scale_min) << "\n"
      << "  scale_max: " << fmt_double(c.wavelet.scale_max) << "\n"
      << "  detrend: " << (c.wavelet.detrend ? "true" : "false") << "\n"
      << "analysis:\n"
      << "  envelope_window: " << fmt_double(c.analysis.envelope_window) << "\n"
      << "  node_threshold: " << fmt_double(c.analysis.node_threshold) << "\n"
      << "output:\n"
      << "  directory: " << quoted(c.output.directory) << "\n"
      << "  prefix: " << quoted(c.output.prefix) << "\n";
  return out.str();
}

std::string config_reference() {
  return R"(Configuration document (YAML). Every key is optional.

model:
  n_qubits: 1            number of qubits N
  g: 1.0                 dipole coupling; defines the time unit
  omega: 10 g            resonant field/qubit frequency
  alpha: 5.0             coherent field amplitude (number or [re, im]); nbar = |alpha|^2
  z: 1.0                 spin coherent parameter (number or [re, im])
  spin_state: cat        cat | coherent
  parity: minus          minus | plus (cat states only)
space:
  n_max: ceil(nbar + 10 sqrt(nbar)), at least N + 2
  representation: symmetric   symmetric | full
  max_dimension: 4194304
measurement:
  gamma: 0.0             measurement strength; L = sqrt(2 gamma) a
  record_mode: noisy if gamma > 0, else ideal
integration:
  dt: t_R/500 if gamma = 0, else min(t_R/2000, 2.5e-6 / (gamma (nbar + N)))
  t_final: 1.2 t_r1
  output_stride: round(t_final / dt / 4000), at least 1
  seed: 1                master seed (64-bit)
  trajectories: 1
  workers: 0             0 = hardware concurrency
  frame: interaction     interaction | lab
  scheme: rk4            rk4 | euler
wavelet:
  omega0: 6.0            Morlet central frequency (>= 5)
  n_scales: 64
  scale_min: 2.0         sampling intervals
  scale_max: 0.0         sampling intervals; 0 = n_samples / 4
  detrend: true
analysis:
  envelope_window: 0.0   0 = 2 t_R
  node_threshold: 0.25   fraction of the band-power maximum
output:
  directory: "qsdcat-out"
  prefix: "trajectory"
)";
}

}  // namespace qsdcat
