#include "qsdcat/qsd.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsdcat/config.hpp"
#include "qsdcat/errors.hpp"
#include "qsdcat/model.hpp"
#include "qsdcat/observe.hpp"

namespace qsdcat {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double fock_edge_population(const StateVector& state) {
  const auto& space = state.space();
  const auto& psi = state.amplitudes();
  double p = 0.0;
  for (std::size_t n = space.field_dim() - 2; n < space.field_dim(); ++n) {
    for (std::size_t s = 0; s < space.spin_dim(); ++s) {
      p += std::norm(psi(static_cast<Eigen::Index>(space.index(n, s))));
    }
  }
  return p;
}

}  // namespace

std::size_t IntegrationParams::sample_count() const {
  const double steps_per_sample = dt * output_stride;
  return static_cast<std::size_t>(std::floor(t_final / steps_per_sample + 1e-9)) + 1;
}

WienerStream::WienerStream(std::uint64_t master_seed, std::uint64_t trajectory_index)
    : engine_(splitmix64(splitmix64(master_seed) ^ splitmix64(~trajectory_index))) {}

Complex WienerStream::draw(double dt) {
  const double scale = std::sqrt(0.5 * dt);
  const double x = normal_(engine_);
  const double y = normal_(engine_);
  return {x * scale, y * scale};
}

Complex draw_wiener(double dt, WienerStream& stream) {
  if (!(dt > 0.0)) throw ParameterError("Wiener increment needs dt > 0");
  return stream.draw(dt);
}

QsdIntegrator::QsdIntegrator(const LinearOperator& h, const LinearOperator& lindblad,
                             StepScheme scheme)
    : h_(h.matrix()),
      l_(lindblad.matrix()),
      ldag_l_(SparseMatrix(lindblad.matrix().adjoint()) * lindblad.matrix()),
      scheme_(scheme),
      has_lindblad_(lindblad.matrix().nonZeros() > 0) {
  if (!(h.space() == lindblad.space())) {
    throw StructuralError("Hamiltonian and Lindblad operator act on different spaces");
  }
  const auto d = static_cast<Eigen::Index>(h.space().dim());
  for (CVector* v : {&lpsi_, &k1_, &k2_, &k3_, &k4_, &tmp_}) v->resize(d);
}

void QsdIntegrator::drift(const CVector& psi, CVector& out) {
  out.noalias() = h_ * psi;
  out *= Complex(0.0, -1.0);
  if (!has_lindblad_) return;
  lpsi_.noalias() = l_ * psi;
  const double norm2 = psi.squaredNorm();
  const Complex l_mean = psi.dot(lpsi_) / norm2;
  out += std::conj(l_mean) * lpsi_;
  out.noalias() -= 0.5 * (ldag_l_ * psi);
  out -= (0.5 * std::norm(l_mean)) * psi;
}

double QsdIntegrator::step(CVector& psi, double dt, Complex dxi) {
  // Noise increment uses the start-of-step state (Ito).
  CVector noise;
  if (has_lindblad_ && dxi != Complex(0.0)) {
    noise.noalias() = l_ * psi;
    const Complex l_mean = psi.dot(noise) / psi.squaredNorm();
    noise -= l_mean * psi;
    noise *= dxi;
  }

  if (scheme_ == StepScheme::EulerMaruyama) {
    drift(psi, k1_);
    psi += dt * k1_;
  } else {
    drift(psi, k1_);
    tmp_ = psi + (0.5 * dt) * k1_;
    drift(tmp_, k2_);
    tmp_ = psi + (0.5 * dt) * k2_;
    drift(tmp_, k3_);
    tmp_ = psi + dt * k3_;
    drift(tmp_, k4_);
    psi += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }
  if (noise.size() > 0) psi += noise;

  const double norm = psi.norm();
  const double drift_amount = std::abs(norm - 1.0);
  if (!(drift_amount <= kMaxStepNormDrift)) {
    throw StepSizeError("single-step norm drift " + std::to_string(drift_amount) +
                        " exceeds " + std::to_string(kMaxStepNormDrift) + "; reduce dt");
  }
  psi /= norm;
  return drift_amount;
}

StepResult qsd_step(const StateVector& state, const LinearOperator& h,
                    const LinearOperator& lindblad, double dt, Complex dxi, StepScheme scheme) {
  if (!(state.space() == h.space())) throw StructuralError("state and Hamiltonian spaces differ");
  if (!state.is_normalized()) throw StructuralError("qsd_step requires a normalized state");
  if (!(dt > 0.0)) throw ParameterError("qsd_step needs dt > 0");
  QsdIntegrator integrator(h, lindblad, scheme);
  CVector psi = state.amplitudes();
  const double drift = integrator.step(psi, dt, dxi);
  return {StateVector(state.space(), std::move(psi)), drift};
}

double accumulate_record(double q_expect, Complex dxi, double gamma, double dt, RecordMode mode) {
  const double signal = q_expect * dt;
  if (mode == RecordMode::Ideal) return signal;
  if (!(gamma > 0.0)) throw ParameterError("noisy record requires gamma > 0");
  const double dw = std::numbers::sqrt2 * dxi.real();
  return signal + dw / std::sqrt(8.0 * gamma);
}

StateVector prepare_initial_state(const SimConfig& config) {
  const SpaceSpec space = config.space_spec();
  const CVector field_state = coherent_state(config.initial.alpha, space.n_max());
  const CVector spin_state =
      config.initial.spin == SpinPreparation::Cat
          ? spin_cat_state(config.initial.z, space.n_qubits(), config.initial.parity,
                           space.representation())
          : spin_coherent_state(config.initial.z, space.n_qubits(), space.representation());
  return embed_product(field_state, spin_state, space);
}

TrajectoryResult run_trajectory(const SimConfig& config) {
  config.validate();
  const SpaceSpec space = config.space_spec();
  const LinearOperator h = config.integration.frame == Frame::Interaction
                               ? build_coupling_hamiltonian(config.model, space)
                               : build_hamiltonian(config.model, space);
  return integrate_trajectory(config, h);
}

TrajectoryResult integrate_trajectory(const SimConfig& config, const LinearOperator& h) {
  config.validate();
  const SpaceSpec space = config.space_spec();
  if (!(h.space() == space)) throw StructuralError("Hamiltonian space does not match the config");
  const auto& ip = config.integration;
  const auto& mp = config.measurement;
  const double omega = config.model.omega;

  const auto field = build_field_ops(space);
  const LinearOperator lindblad = Complex(std::sqrt(2.0 * mp.gamma)) * field.annihilation;

  StateVector state = prepare_initial_state(config);

  const std::size_t samples = ip.sample_count();
  const auto stride = static_cast<std::size_t>(ip.output_stride);
  const std::size_t steps = (samples - 1) * stride;

  auto rotation = [&](double t) {
    return ip.frame == Frame::Interaction ? std::polar(1.0, -omega * t) : Complex(1.0);
  };
  auto lab_q = [&](double t) {
    return std::numbers::sqrt2 * (rotation(t) * field_amplitude(state)).real();
  };

  TrajectoryResult result{.times = {}, .p_all_ground = {}, .q_expect = {}, .record = {},
                          .norm_drift = {}, .jz_expect = {}, .photon_number = {},
                          .max_renormalized_error = 0.0, .final_state = state};
  for (auto* v : {&result.times, &result.p_all_ground, &result.q_expect, &result.record,
                  &result.norm_drift, &result.jz_expect, &result.photon_number}) {
    v->reserve(samples);
  }

  WienerStream stream(ip.seed, ip.trajectory_index);
  QsdIntegrator integrator(h, lindblad, ip.scheme);
  double record = 0.0;
  double max_drift = 0.0;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * ip.dt;
    const double q = lab_q(t);
    if (k % stride == 0) {
      const double edge = fock_edge_population(state);
      if (edge > kMaxFockEdgePopulation) {
        throw TruncationError("population " + std::to_string(edge) +
                                  " in the top two Fock levels at t=" + std::to_string(t) +
                                  "; increase space.n_max",
                              t);
      }
      result.times.push_back(t);
      result.p_all_ground.push_back(p_all_ground(state));
      result.q_expect.push_back(q);
      result.record.push_back(record);
      result.norm_drift.push_back(max_drift);
      result.jz_expect.push_back(spin_projection(state));
      result.photon_number.push_back(photon_number(state));
      max_drift = 0.0;
    }
    if (k == steps) break;

    const Complex dxi = stream.draw(ip.dt);
    try {
      const double drift = integrator.step(state.amplitudes(), ip.dt, rotation(t) * dxi);
      max_drift = std::max(max_drift, drift);
      result.max_renormalized_error = std::max(result.max_renormalized_error,
                                               std::abs(state.amplitudes().squaredNorm() - 1.0));
    } catch (const StepSizeError& e) {
      throw StepSizeError(std::string(e.what()) + " at t=" + std::to_string(t), t);
    }
    record += accumulate_record(q, dxi, mp.gamma, ip.dt, mp.record_mode);
  }
  result.final_state = state;
  return result;
}

}  // namespace qsdcat
