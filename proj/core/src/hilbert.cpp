#include "qsdcat/hilbert.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "qsdcat/errors.hpp"

namespace qsdcat {

namespace {

using Triplet = Eigen::Triplet<Complex>;

constexpr double kHermitianTol = 1e-12;
constexpr double kRealTol = 1e-10;
constexpr double kSymmetryTol = 1e-10;

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// Extends a spin-factor operator over the field: I_field (x) S.
SparseMatrix extend_spin(const SpaceSpec& space, const std::vector<Triplet>& spin_entries) {
  std::vector<Triplet> entries;
  entries.reserve(spin_entries.size() * space.field_dim());
  for (std::size_t n = 0; n < space.field_dim(); ++n) {
    for (const auto& t : spin_entries) {
      entries.emplace_back(static_cast<int>(space.index(n, t.row())),
                           static_cast<int>(space.index(n, t.col())), t.value());
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

void require_same_space(const LinearOperator& a, const LinearOperator& b) {
  if (!(a.space() == b.space())) throw StructuralError("operators act on different spaces");
}

}  // namespace

const char* to_string(Representation rep) {
  return rep == Representation::Full ? "full" : "symmetric";
}

SpaceSpec::SpaceSpec(int n_max, int n_qubits, Representation rep, std::size_t max_dimension)
    : n_max_(n_max), n_qubits_(n_qubits), rep_(rep), spin_dim_(0) {
  if (n_max < 1) throw ParameterError("n_max must be >= 1, got " + std::to_string(n_max));
  if (n_qubits < 1) throw ParameterError("n_qubits must be >= 1, got " + std::to_string(n_qubits));
  if (rep == Representation::Full) {
    if (n_qubits > 40) {
      throw CapacityError("full representation with " + std::to_string(n_qubits) +
                          " qubits exceeds the dimension cap");
    }
    spin_dim_ = std::size_t{1} << n_qubits;
  } else {
    spin_dim_ = static_cast<std::size_t>(n_qubits) + 1;
  }
  if (field_dim() > max_dimension / spin_dim_) {
    throw CapacityError("space dimension " + std::to_string(field_dim()) + " x " +
                        std::to_string(spin_dim_) + " exceeds the cap of " +
                        std::to_string(max_dimension));
  }
}

double SpaceSpec::spin_projection(std::size_t spin) const {
  const double excitations = rep_ == Representation::Full
                                 ? static_cast<double>(std::popcount(spin))
                                 : static_cast<double>(spin);
  return excitations - 0.5 * n_qubits_;
}

StateVector::StateVector(SpaceSpec space, CVector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != space_.dim()) {
    throw StructuralError("state has " + std::to_string(amplitudes_.size()) +
                          " amplitudes, space dimension is " + std::to_string(space_.dim()));
  }
}

bool StateVector::is_normalized(double tol) const {
  return std::abs(amplitudes_.squaredNorm() - 1.0) <= tol;
}

double StateVector::renormalize() {
  const double n = amplitudes_.norm();
  if (n == 0.0) throw StructuralError("cannot renormalize the zero vector");
  amplitudes_ /= n;
  return n;
}

LinearOperator::LinearOperator(SpaceSpec space, SparseMatrix matrix, bool hermitian)
    : space_(space), matrix_(std::move(matrix)), hermitian_(hermitian) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw StructuralError("operator is " + std::to_string(matrix_.rows()) + "x" +
                          std::to_string(matrix_.cols()) + ", space dimension is " +
                          std::to_string(d));
  }
  matrix_.makeCompressed();
  if (hermitian_) {
    const double defect = hermiticity_defect();
    if (defect >= kHermitianTol) {
      throw StructuralError("operator flagged Hermitian has |M - M^dagger| = " +
                            std::to_string(defect));
    }
  }
}

CVector LinearOperator::apply(const CVector& v) const {
  if (static_cast<std::size_t>(v.size()) != space_.dim()) {
    throw StructuralError("vector length does not match operator dimension");
  }
  return matrix_ * v;
}

LinearOperator LinearOperator::adjoint() const {
  return LinearOperator(space_, SparseMatrix(matrix_.adjoint()), hermitian_);
}

double LinearOperator::hermiticity_defect() const {
  return max_abs_entry(SparseMatrix(matrix_ - SparseMatrix(matrix_.adjoint())));
}

LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
  require_same_space(a, b);
  return LinearOperator(a.space_, a.matrix_ + b.matrix_, a.hermitian_ && b.hermitian_);
}

LinearOperator operator-(const LinearOperator& a, const LinearOperator& b) {
  require_same_space(a, b);
  return LinearOperator(a.space_, a.matrix_ - b.matrix_, a.hermitian_ && b.hermitian_);
}

LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
  require_same_space(a, b);
  return LinearOperator(a.space_, SparseMatrix(a.matrix_ * b.matrix_));
}

LinearOperator operator*(Complex s, const LinearOperator& a) {
  return LinearOperator(a.space_, SparseMatrix(s * a.matrix_), a.hermitian_ && s.imag() == 0.0);
}

LinearOperator commutator(const LinearOperator& a, const LinearOperator& b) {
  return a * b - b * a;
}

double max_abs_entry(const SparseMatrix& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
  }
  return best;
}

LinearOperator identity(const SpaceSpec& space) {
  SparseMatrix m(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  m.setIdentity();
  return LinearOperator(space, std::move(m), true);
}

FieldOperators build_field_ops(const SpaceSpec& space) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(space.n_max()) * space.spin_dim());
  for (std::size_t n = 0; n + 1 < space.field_dim(); ++n) {
    const double amp = std::sqrt(static_cast<double>(n + 1));
    for (std::size_t s = 0; s < space.spin_dim(); ++s) {
      entries.emplace_back(static_cast<int>(space.index(n, s)),
                           static_cast<int>(space.index(n + 1, s)), amp);
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  a.setFromTriplets(entries.begin(), entries.end());

  LinearOperator annihilation(space, a);
  LinearOperator creation = annihilation.adjoint();
  SparseMatrix number = creation.matrix() * annihilation.matrix();
  return {annihilation, creation, LinearOperator(space, std::move(number), true)};
}

SpinOperators build_spin_ops(const SpaceSpec& space) {
  std::vector<Triplet> jz_entries;
  std::vector<Triplet> jp_entries;
  const int n = space.n_qubits();
  for (std::size_t s = 0; s < space.spin_dim(); ++s) {
    jz_entries.emplace_back(static_cast<int>(s), static_cast<int>(s), space.spin_projection(s));
  }
  if (space.representation() == Representation::Symmetric) {
    const double j = 0.5 * n;
    for (std::size_t k = 0; k + 1 < space.spin_dim(); ++k) {
      const double m = space.spin_projection(k);
      jp_entries.emplace_back(static_cast<int>(k + 1), static_cast<int>(k),
                              std::sqrt(j * (j + 1.0) - m * (m + 1.0)));
    }
  } else {
    for (std::size_t s = 0; s < space.spin_dim(); ++s) {
      for (int q = 0; q < n; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        if ((s & bit) == 0) {
          jp_entries.emplace_back(static_cast<int>(s | bit), static_cast<int>(s), 1.0);
        }
      }
    }
  }
  LinearOperator jz(space, extend_spin(space, jz_entries), true);
  LinearOperator jplus(space, extend_spin(space, jp_entries));
  LinearOperator jminus = jplus.adjoint();
  return {jz, jplus, jminus};
}

Complex expectation(const StateVector& state, const LinearOperator& op) {
  if (!(state.space() == op.space())) throw StructuralError("state and operator spaces differ");
  if (!state.is_normalized()) {
    throw StructuralError("expectation requires a normalized state (|psi|^2 = " +
                          std::to_string(state.amplitudes().squaredNorm()) + ")");
  }
  const Complex value = state.amplitudes().dot(op.matrix() * state.amplitudes());
  if (op.hermitian() && std::abs(value.imag()) >= kRealTol) {
    throw StructuralError("Hermitian expectation has imaginary part " +
                          std::to_string(value.imag()));
  }
  return value;
}

DickeProjection project_to_dicke(const CVector& full_spin, int n_qubits) {
  const std::size_t full_dim = std::size_t{1} << n_qubits;
  if (static_cast<std::size_t>(full_spin.size()) != full_dim) {
    throw StructuralError("spin vector length does not match 2^N");
  }
  CVector dicke = CVector::Zero(n_qubits + 1);
  for (std::size_t s = 0; s < full_dim; ++s) dicke(std::popcount(s)) += full_spin(s);
  for (int k = 0; k <= n_qubits; ++k) dicke(k) /= std::sqrt(binomial(n_qubits, k));
  const double residual = (full_spin - dicke_to_full(dicke, n_qubits)).norm();
  return {std::move(dicke), residual};
}

CVector dicke_to_full(const CVector& dicke, int n_qubits) {
  if (dicke.size() != n_qubits + 1) throw StructuralError("Dicke vector length must be N+1");
  const std::size_t full_dim = std::size_t{1} << n_qubits;
  CVector full(static_cast<Eigen::Index>(full_dim));
  for (std::size_t s = 0; s < full_dim; ++s) {
    const int k = std::popcount(s);
    full(static_cast<Eigen::Index>(s)) = dicke(k) / std::sqrt(binomial(n_qubits, k));
  }
  return full;
}

StateVector embed_product(const CVector& field_state, const CVector& spin_state,
                          const SpaceSpec& space) {
  if (static_cast<std::size_t>(field_state.size()) != space.field_dim()) {
    throw StructuralError("field factor has " + std::to_string(field_state.size()) +
                          " amplitudes, expected " + std::to_string(space.field_dim()));
  }
  CVector spin = spin_state;
  if (static_cast<std::size_t>(spin.size()) != space.spin_dim()) {
    const bool full_input = space.representation() == Representation::Symmetric &&
                            space.n_qubits() < 40 &&
                            static_cast<std::size_t>(spin.size()) ==
                                (std::size_t{1} << space.n_qubits());
    if (!full_input) {
      throw StructuralError("spin factor has " + std::to_string(spin.size()) +
                            " amplitudes, expected " + std::to_string(space.spin_dim()));
    }
    auto projection = project_to_dicke(spin, space.n_qubits());
    const double scale = spin.norm();
    if (scale == 0.0 || projection.residual / scale > kSymmetryTol) {
      throw RepresentationError("spin state is not permutation symmetric (residual " +
                                std::to_string(projection.residual) + ")");
    }
    spin = std::move(projection.amplitudes);
  }

  CVector amplitudes(static_cast<Eigen::Index>(space.dim()));
  for (std::size_t n = 0; n < space.field_dim(); ++n) {
    for (std::size_t s = 0; s < space.spin_dim(); ++s) {
      amplitudes(static_cast<Eigen::Index>(space.index(n, s))) =
          field_state(static_cast<Eigen::Index>(n)) * spin(static_cast<Eigen::Index>(s));
    }
  }
  StateVector state(space, std::move(amplitudes));
  state.renormalize();
  return state;
}

}  // namespace qsdcat
