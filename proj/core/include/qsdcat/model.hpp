#pragma once

#include "qsdcat/hilbert.hpp"

namespace qsdcat {

/// Resonant Tavis-Cummings parameters in natural units (hbar = 1).
struct ModelParams {
  double omega = 10.0;  // field and qubit angular frequency
  double g = 1.0;       // dipole coupling
  int n_qubits = 1;

  void validate() const;
  bool operator==(const ModelParams&) const = default;
};

/// Collapse/revival timescales of a coherent field of mean photon number nbar.
struct Timescales {
  double rabi;           // t_R = pi / (g sqrt(nbar))
  double collapse;       // t_c = sqrt(2) / g
  double revival;        // t_r = 2 pi sqrt(nbar) / g
  double first_revival;  // t_r1 = t_r / N
};

Timescales timescales(const ModelParams& params, double nbar);

/// Highest Fock level kept by default: ceil(nbar + 10 sqrt(nbar)).
int default_fock_cutoff(double nbar);

/// omega a^dag a + omega Jz.
LinearOperator build_free_hamiltonian(const ModelParams& params, const SpaceSpec& space);
/// g (J+ a + J- a^dag).
LinearOperator build_coupling_hamiltonian(const ModelParams& params, const SpaceSpec& space);
/// Full Tavis-Cummings Hamiltonian, free + coupling.
LinearOperator build_hamiltonian(const ModelParams& params, const SpaceSpec& space);

/// a^dag a + Jz + N/2, conserved by the RWA Hamiltonian.
LinearOperator excitation_number(const SpaceSpec& space);
/// Product of sigma_z over all qubits. Maps |z,N> to |-z,N>, so cat states are its eigenstates.
LinearOperator spin_parity(const SpaceSpec& space);

/// 1 - sum_{n <= n_max} |c_n|^2 for the untruncated coherent state.
double coherent_leakage(Complex alpha, int n_max);

/// Truncated, renormalized coherent state |alpha> on levels 0..n_max.
/// Throws TruncationError if the discarded tail exceeds `leakage_tol`.
CVector coherent_state(Complex alpha, int n_max, double leakage_tol = 1e-6);

/// Spin coherent state |z,N> = (1+|z|^2)^{-N/2} (x)_k (|e> + z|g>).
CVector spin_coherent_state(Complex z, int n_qubits, Representation rep);

enum class CatParity { Plus, Minus };

/// (|z,N> +/- |-z,N>), renormalized. Throws DegeneracyError when the two terms cancel.
CVector spin_cat_state(Complex z, int n_qubits, CatParity parity, Representation rep);

}  // namespace qsdcat
