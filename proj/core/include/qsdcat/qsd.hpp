#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qsdcat/hilbert.hpp"

namespace qsdcat {

struct SimConfig;

enum class RecordMode { Ideal, Noisy };

struct MeasurementParams {
  double gamma = 0.0;  // measurement strength; L = sqrt(2 gamma) a
  RecordMode record_mode = RecordMode::Ideal;

  bool operator==(const MeasurementParams&) const = default;
};

/// Interaction: state evolves under g(J+a + J-a^dag) in the frame rotating
/// with omega(a^dag a + Jz); observables and the record are reported in the
/// lab frame. Lab: state evolves under the full Hamiltonian.
enum class Frame { Interaction, Lab };

/// RungeKuttaDrift: RK4 over the deterministic Ito drift, Euler-Maruyama
/// noise. EulerMaruyama: first-order in both.
enum class StepScheme { RungeKuttaDrift, EulerMaruyama };

struct IntegrationParams {
  double dt = 0.0;
  double t_final = 0.0;
  int output_stride = 1;
  std::uint64_t seed = 1;
  std::uint64_t trajectory_index = 0;
  Frame frame = Frame::Interaction;
  StepScheme scheme = StepScheme::RungeKuttaDrift;

  /// Samples per trajectory: floor(t_final / (dt * stride)) + 1.
  std::size_t sample_count() const;
  bool operator==(const IntegrationParams&) const = default;
};

/// Single-step pre-renormalization drift above which a step aborts.
inline constexpr double kMaxStepNormDrift = 1e-3;
/// Summed population of the top two Fock levels above which a run aborts.
inline constexpr double kMaxFockEdgePopulation = 1e-6;

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<double> p_all_ground;
  std::vector<double> q_expect;
  std::vector<double> record;
  std::vector<double> norm_drift;  // max pre-renormalization |norm - 1| since the previous sample
  std::vector<double> jz_expect;
  std::vector<double> photon_number;
  double max_renormalized_error = 0.0;  // max |<psi|psi> - 1| after renormalization, all steps
  StateVector final_state;
};

/// Per-trajectory Gaussian stream. The engine seed is a SplitMix64 mix of
/// (master seed, trajectory index), so draws do not depend on scheduling.
class WienerStream {
 public:
  WienerStream(std::uint64_t master_seed, std::uint64_t trajectory_index);

  /// Complex Wiener increment (x + iy) sqrt(dt/2), x and y standard normal.
  Complex draw(double dt);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

Complex draw_wiener(double dt, WienerStream& stream);

/// Reusable QSD stepper for a fixed (H, L) pair.
class QsdIntegrator {
 public:
  QsdIntegrator(const LinearOperator& h, const LinearOperator& lindblad,
                StepScheme scheme = StepScheme::RungeKuttaDrift);

  /// Advances psi in place by dt with increment dxi and renormalizes.
  /// Returns the pre-renormalization |norm - 1|; throws StepSizeError above kMaxStepNormDrift.
  double step(CVector& psi, double dt, Complex dxi);

 private:
  void drift(const CVector& psi, CVector& out);

  SparseMatrix h_;
  SparseMatrix l_;
  SparseMatrix ldag_l_;
  StepScheme scheme_;
  bool has_lindblad_;
  CVector lpsi_, k1_, k2_, k3_, k4_, tmp_;
};

struct StepResult {
  StateVector state;
  double norm_drift;
};

/// One QSD step: -iH psi dt + (<L^dag> L - L^dag L / 2 - |<L>|^2 / 2) psi dt + (L - <L>) psi dxi.
StepResult qsd_step(const StateVector& state, const LinearOperator& h,
                    const LinearOperator& lindblad, double dt, Complex dxi,
                    StepScheme scheme = StepScheme::RungeKuttaDrift);

/// Record increment: <q> dt, plus sqrt(2) Re(dxi) / sqrt(8 gamma) for a noisy record.
double accumulate_record(double q_expect, Complex dxi, double gamma, double dt, RecordMode mode);

/// |alpha> (x) spin state of the configured experiment.
StateVector prepare_initial_state(const SimConfig& config);

/// Integrates one trajectory of the configured experiment.
/// Deterministic in (seed, trajectory_index).
TrajectoryResult run_trajectory(const SimConfig& config);

/// As run_trajectory with a caller-supplied Hamiltonian, which must already
/// be expressed in config.integration.frame (coupling only for Interaction).
TrajectoryResult integrate_trajectory(const SimConfig& config, const LinearOperator& h);

}  // namespace qsdcat
