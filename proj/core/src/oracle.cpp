#include "qsdcat/oracle.hpp"

#include <cmath>
#include <string>

#include "qsdcat/config.hpp"
#include "qsdcat/errors.hpp"
#include "qsdcat/observe.hpp"

namespace qsdcat {

namespace {

void require_oracle_size(const SpaceSpec& space) {
  if (space.dim() > kOracleMaxDimension) {
    throw CapacityError("dense oracle dimension " + std::to_string(space.dim()) +
                        " exceeds the cap of " + std::to_string(kOracleMaxDimension));
  }
}

std::size_t step_count(double dt, double t_final) {
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw ParameterError("oracle needs dt > 0, t_final >= 0");
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

}  // namespace

DensityMatrix::DensityMatrix(SpaceSpec space, Eigen::MatrixXcd entries)
    : space_(space), entries_(std::move(entries)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (entries_.rows() != d || entries_.cols() != d) {
    throw StructuralError("density matrix does not match the space dimension");
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& state) {
  const CVector& psi = state.amplitudes();
  return DensityMatrix(state.space(), psi * psi.adjoint());
}

Complex DensityMatrix::expectation(const LinearOperator& op) const {
  if (!(op.space() == space_)) throw StructuralError("operator and density matrix spaces differ");
  return (op.matrix() * entries_).trace();
}

bool DensityMatrix::is_physical() const {
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) return false;
  if (std::abs(trace() - Complex(1.0)) > 1e-8) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -1e-8;
}

std::vector<StateVector> schrodinger_evolve(const StateVector& state, const LinearOperator& h,
                                            double dt, double t_final, int sample_stride) {
  require_oracle_size(state.space());
  if (!(state.space() == h.space())) throw StructuralError("state and Hamiltonian spaces differ");
  if (sample_stride < 1) throw ParameterError("sample_stride must be >= 1");
  const std::size_t steps = step_count(dt, t_final);
  const SparseMatrix& m = h.matrix();
  const Complex minus_i(0.0, -1.0);

  std::vector<StateVector> out{state};
  CVector psi = state.amplitudes();
  for (std::size_t k = 1; k <= steps; ++k) {
    const CVector k1 = minus_i * (m * psi);
    const CVector k2 = minus_i * (m * (psi + 0.5 * dt * k1));
    const CVector k3 = minus_i * (m * (psi + 0.5 * dt * k2));
    const CVector k4 = minus_i * (m * (psi + dt * k3));
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    psi.normalize();
    if (k % static_cast<std::size_t>(sample_stride) == 0) out.emplace_back(state.space(), psi);
  }
  return out;
}

std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix& rho, const LinearOperator& h,
                                           const LinearOperator& lindblad, double dt,
                                           double t_final, int sample_stride) {
  require_oracle_size(rho.space());
  if (!(rho.space() == h.space()) || !(rho.space() == lindblad.space())) {
    throw StructuralError("density matrix and operators act on different spaces");
  }
  if (sample_stride < 1) throw ParameterError("sample_stride must be >= 1");
  const std::size_t steps = step_count(dt, t_final);
  const SparseMatrix& hm = h.matrix();
  const SparseMatrix& l = lindblad.matrix();
  const SparseMatrix ldag = l.adjoint();
  const SparseMatrix ldag_l = ldag * l;
  const Complex minus_i(0.0, -1.0);

  auto rhs = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
    const Eigen::MatrixXcd hr = hm * r;
    const Eigen::MatrixXcd anti = ldag_l * r;
    const Eigen::MatrixXcd lr = l * r;
    // -i(Hr - rH) + L r L^dag - (L^dag L r + r L^dag L)/2, using rH = (H r)^dag for Hermitian r.
    return minus_i * (hr - hr.adjoint()) + lr * ldag - 0.5 * (anti + anti.adjoint());
  };

  std::vector<DensityMatrix> out{rho};
  Eigen::MatrixXcd r = rho.entries();
  for (std::size_t k = 1; k <= steps; ++k) {
    const Eigen::MatrixXcd k1 = rhs(r);
    const Eigen::MatrixXcd k2 = rhs(r + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = rhs(r + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = rhs(r + dt * k3);
    r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (k % static_cast<std::size_t>(sample_stride) == 0) out.emplace_back(rho.space(), r);
  }
  return out;
}

std::vector<double> jc_analytic_pe(double nbar, double g, std::span<const double> times) {
  if (!(nbar > 0.0)) throw ParameterError("jc_analytic_pe needs nbar > 0");
  const int n_top = static_cast<int>(std::ceil(nbar + 10.0 * std::sqrt(nbar)));
  std::vector<double> weights(static_cast<std::size_t>(n_top) + 1);
  for (int n = 0; n <= n_top; ++n) {
    weights[n] = std::exp(-nbar + n * std::log(nbar) - std::lgamma(n + 1.0));
  }
  std::vector<double> pe;
  pe.reserve(times.size());
  for (double t : times) {
    double sum = 0.0;
    for (int n = 0; n <= n_top; ++n) sum += weights[n] * std::cos(2.0 * g * std::sqrt(n + 1.0) * t);
    pe.push_back(0.5 * (1.0 + sum));
  }
  return pe;
}

CrossRepresentationReport cross_representation_check(const SimConfig& config) {
  if (config.model.n_qubits > 4 || config.space.n_max > 15) {
    throw CapacityError("cross-representation check needs N <= 4 and n_max <= 15");
  }
  const SpaceSpec full(config.space.n_max, config.model.n_qubits, Representation::Full);
  const SpaceSpec sym(config.space.n_max, config.model.n_qubits, Representation::Symmetric);
  // Both representations share this field factor, so its truncation tail cancels out of the
  // comparison; the leakage guard would only block the small cutoffs this check needs.
  const CVector field = coherent_state(config.initial.alpha, config.space.n_max, 1.0);

  // Full-basis spin vector; the Symmetric embedding projects it onto the Dicke basis.
  const CVector spin = config.initial.spin == SpinPreparation::Cat
                           ? spin_cat_state(config.initial.z, config.model.n_qubits,
                                            config.initial.parity, Representation::Full)
                           : spin_coherent_state(config.initial.z, config.model.n_qubits,
                                                 Representation::Full);

  const double dt = config.integration.dt;
  const double t_final = config.integration.t_final;
  const int stride = config.integration.output_stride;
  const auto full_run = schrodinger_evolve(embed_product(field, spin, full),
                                           build_hamiltonian(config.model, full), dt, t_final,
                                           stride);
  const auto sym_run = schrodinger_evolve(embed_product(field, spin, sym),
                                          build_hamiltonian(config.model, sym), dt, t_final,
                                          stride);

  CrossRepresentationReport report;
  for (std::size_t i = 0; i < full_run.size(); ++i) {
    report.max_dev_p_all_ground =
        std::max(report.max_dev_p_all_ground,
                 std::abs(p_all_ground(full_run[i]) - p_all_ground(sym_run[i])));
    report.max_dev_jz = std::max(report.max_dev_jz, std::abs(spin_projection(full_run[i]) -
                                                             spin_projection(sym_run[i])));
    report.max_dev_photon_number =
        std::max(report.max_dev_photon_number,
                 std::abs(photon_number(full_run[i]) - photon_number(sym_run[i])));
  }
  report.passed = report.max_dev_p_all_ground < 1e-8 && report.max_dev_jz < 1e-8 &&
                  report.max_dev_photon_number < 1e-8;
  return report;
}

}  // namespace qsdcat
