#pragma once

#include <span>
#include <vector>

#include "qsdcat/hilbert.hpp"
#include "qsdcat/model.hpp"

namespace qsdcat {

struct SimConfig;

/// Dense oracles refuse spaces larger than this.
inline constexpr std::size_t kOracleMaxDimension = 2000;

/// Mixed state on a SpaceSpec, stored dense.
class DensityMatrix {
 public:
  DensityMatrix(SpaceSpec space, Eigen::MatrixXcd entries);
  static DensityMatrix from_pure(const StateVector& state);

  const SpaceSpec& space() const { return space_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }

  Complex trace() const { return entries_.trace(); }
  double purity() const { return (entries_ * entries_).trace().real(); }
  Complex expectation(const LinearOperator& op) const;

  /// Hermitian to 1e-10, unit trace to 1e-8, eigenvalues >= -1e-8.
  bool is_physical() const;

 private:
  SpaceSpec space_;
  Eigen::MatrixXcd entries_;
};

/// RK4 on d|psi>/dt = -iH|psi> with renormalization after every step.
/// Returns the initial state followed by one state per `sample_stride` steps.
std::vector<StateVector> schrodinger_evolve(const StateVector& state, const LinearOperator& h,
                                            double dt, double t_final, int sample_stride = 1);

/// RK4 on d rho/dt = -i[H, rho] + L rho L^dag - {L^dag L, rho}/2, sampled like schrodinger_evolve.
std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix& rho, const LinearOperator& h,
                                           const LinearOperator& lindblad, double dt,
                                           double t_final, int sample_stride = 1);

/// Jaynes-Cummings excited-state probability for |e> (x) |alpha>, |alpha|^2 = nbar:
/// P_e(t) = (1 + sum_n p_n cos(2 g sqrt(n+1) t)) / 2, Poisson p_n, n <= nbar + 10 sqrt(nbar).
std::vector<double> jc_analytic_pe(double nbar, double g, std::span<const double> times);

struct CrossRepresentationReport {
  double max_dev_p_all_ground = 0.0;
  double max_dev_jz = 0.0;
  double max_dev_photon_number = 0.0;
  bool passed = false;
};

/// Evolves the configured gamma = 0 initial state in both representations and
/// compares observables sample by sample. Requires N <= 4 and n_max <= 15.
CrossRepresentationReport cross_representation_check(const SimConfig& config);

}  // namespace qsdcat
