#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qsdcat {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Full keeps all 2^N qubit configurations; Symmetric keeps the N+1 Dicke states with j = N/2.
enum class Representation { Full, Symmetric };

const char* to_string(Representation rep);

/// Truncated Fock space (levels 0..n_max) tensored with N qubits.
///
/// Composite index layout is field-major: index = fock * spin_dim() + spin.
/// Spin index 0 is |g...g> in both representations. In Full, bit k of the
/// spin index is qubit k (1 = excited). In Symmetric, the spin index counts
/// excitations, so Dicke index k carries Jz eigenvalue k - N/2.
class SpaceSpec {
 public:
  static constexpr std::size_t kDefaultMaxDimension = std::size_t{1} << 22;

  SpaceSpec(int n_max, int n_qubits, Representation rep = Representation::Symmetric,
            std::size_t max_dimension = kDefaultMaxDimension);

  int n_max() const { return n_max_; }
  int n_qubits() const { return n_qubits_; }
  Representation representation() const { return rep_; }

  std::size_t field_dim() const { return static_cast<std::size_t>(n_max_) + 1; }
  std::size_t spin_dim() const { return spin_dim_; }
  std::size_t dim() const { return field_dim() * spin_dim_; }
  std::size_t index(std::size_t fock, std::size_t spin) const { return fock * spin_dim_ + spin; }

  /// Jz eigenvalue of spin basis state `spin`.
  double spin_projection(std::size_t spin) const;

  bool operator==(const SpaceSpec& other) const {
    return n_max_ == other.n_max_ && n_qubits_ == other.n_qubits_ && rep_ == other.rep_;
  }

 private:
  int n_max_;
  int n_qubits_;
  Representation rep_;
  std::size_t spin_dim_;
};

/// Pure state on a SpaceSpec. Dynamics and observables expect unit norm.
class StateVector {
 public:
  StateVector(SpaceSpec space, CVector amplitudes);

  const SpaceSpec& space() const { return space_; }
  const CVector& amplitudes() const { return amplitudes_; }
  CVector& amplitudes() { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }
  bool is_normalized(double tol = 1e-12) const;
  /// Rescales to unit norm and returns the norm before rescaling.
  double renormalize();

 private:
  SpaceSpec space_;
  CVector amplitudes_;
};

/// Complex sparse matrix bound to a space. A Hermitian flag is verified on construction.
class LinearOperator {
 public:
  LinearOperator(SpaceSpec space, SparseMatrix matrix, bool hermitian = false);

  const SpaceSpec& space() const { return space_; }
  const SparseMatrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }

  CVector apply(const CVector& v) const;
  LinearOperator adjoint() const;
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }

  /// Largest |M - M^dagger| entry.
  double hermiticity_defect() const;

  friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator-(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator*(Complex s, const LinearOperator& a);

 private:
  SpaceSpec space_;
  SparseMatrix matrix_;
  bool hermitian_;
};

/// [A, B] = AB - BA.
LinearOperator commutator(const LinearOperator& a, const LinearOperator& b);
/// Largest absolute entry of a sparse matrix (0 for an empty one).
double max_abs_entry(const SparseMatrix& m);
LinearOperator identity(const SpaceSpec& space);

struct FieldOperators {
  LinearOperator annihilation;
  LinearOperator creation;
  LinearOperator number;
};

struct SpinOperators {
  LinearOperator jz;
  LinearOperator jplus;
  LinearOperator jminus;
};

FieldOperators build_field_ops(const SpaceSpec& space);
SpinOperators build_spin_ops(const SpaceSpec& space);

/// <psi|O|psi>. Throws StructuralError on space mismatch or an unnormalized state.
Complex expectation(const StateVector& state, const LinearOperator& op);

/// Projection of a 2^N qubit vector onto the Dicke basis.
struct DickeProjection {
  CVector amplitudes;  // length N+1, index = number of excitations
  double residual;     // norm of the non-symmetric remainder
};

DickeProjection project_to_dicke(const CVector& full_spin, int n_qubits);
/// Expands Dicke amplitudes back to the 2^N qubit basis.
CVector dicke_to_full(const CVector& dicke, int n_qubits);

/// |field> (x) |spin>, renormalized. A Symmetric space accepts the spin factor
/// either as N+1 Dicke amplitudes or as a 2^N qubit vector, which must be
/// permutation symmetric to 1e-10.
StateVector embed_product(const CVector& field_state, const CVector& spin_state,
                          const SpaceSpec& space);

}  // namespace qsdcat
