#include "qsdcat/model.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qsdcat/errors.hpp"

namespace qsdcat {

namespace {

constexpr double kDegenerateNorm = 1e-8;

Complex integer_power(Complex z, int k) {
  Complex result(1.0);
  for (int i = 0; i < k; ++i) result *= z;
  return result;
}

}  // namespace

void ModelParams::validate() const {
  if (!(g > 0.0)) throw ParameterError("model.g must be > 0, got " + std::to_string(g));
  if (!(omega >= 0.0)) throw ParameterError("model.omega must be >= 0");
  if (n_qubits < 1) throw ParameterError("model.n_qubits must be >= 1");
}

Timescales timescales(const ModelParams& params, double nbar) {
  params.validate();
  if (!(nbar > 0.0)) throw ParameterError("nbar must be > 0");
  constexpr double pi = std::numbers::pi;
  const double root = std::sqrt(nbar);
  Timescales ts{};
  ts.rabi = pi / (params.g * root);
  ts.collapse = std::numbers::sqrt2 / params.g;
  ts.revival = 2.0 * pi * root / params.g;
  ts.first_revival = ts.revival / params.n_qubits;
  return ts;
}

int default_fock_cutoff(double nbar) {
  return static_cast<int>(std::ceil(nbar + 10.0 * std::sqrt(nbar)));
}

LinearOperator build_free_hamiltonian(const ModelParams& params, const SpaceSpec& space) {
  const auto field = build_field_ops(space);
  const auto spin = build_spin_ops(space);
  return Complex(params.omega) * (field.number + spin.jz);
}

LinearOperator build_coupling_hamiltonian(const ModelParams& params, const SpaceSpec& space) {
  if (space.n_qubits() != params.n_qubits) {
    throw StructuralError("space has " + std::to_string(space.n_qubits()) +
                          " qubits, model expects " + std::to_string(params.n_qubits));
  }
  const auto field = build_field_ops(space);
  const auto spin = build_spin_ops(space);
  SparseMatrix h = params.g * (spin.jplus.matrix() * field.annihilation.matrix() +
                               spin.jminus.matrix() * field.creation.matrix());
  return LinearOperator(space, std::move(h), true);
}

LinearOperator build_hamiltonian(const ModelParams& params, const SpaceSpec& space) {
  params.validate();
  return build_free_hamiltonian(params, space) + build_coupling_hamiltonian(params, space);
}

LinearOperator excitation_number(const SpaceSpec& space) {
  const auto field = build_field_ops(space);
  const auto spin = build_spin_ops(space);
  return field.number + spin.jz + Complex(0.5 * space.n_qubits()) * identity(space);
}

LinearOperator spin_parity(const SpaceSpec& space) {
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(space.dim());
  for (std::size_t n = 0; n < space.field_dim(); ++n) {
    for (std::size_t s = 0; s < space.spin_dim(); ++s) {
      const double excited = space.spin_projection(s) + 0.5 * space.n_qubits();
      const auto ground = space.n_qubits() - static_cast<int>(std::lround(excited));
      const auto i = static_cast<int>(space.index(n, s));
      entries.emplace_back(i, i, ground % 2 == 0 ? 1.0 : -1.0);
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  m.setFromTriplets(entries.begin(), entries.end());
  return LinearOperator(space, std::move(m), true);
}

namespace {

// Untruncated Poisson amplitudes e^{-|a|^2/2} a^n / sqrt(n!), computed in log space.
CVector raw_coherent(Complex alpha, int n_max) {
  CVector c(n_max + 1);
  const double r = std::abs(alpha);
  const double phase = std::arg(alpha);
  for (int n = 0; n <= n_max; ++n) {
    if (r == 0.0) {
      c(n) = n == 0 ? 1.0 : 0.0;
      continue;
    }
    const double log_mag = -0.5 * r * r + n * std::log(r) - 0.5 * std::lgamma(n + 1.0);
    c(n) = std::polar(std::exp(log_mag), n * phase);
  }
  return c;
}

}  // namespace

double coherent_leakage(Complex alpha, int n_max) {
  if (n_max < 1) throw ParameterError("n_max must be >= 1");
  return std::max(0.0, 1.0 - raw_coherent(alpha, n_max).squaredNorm());
}

CVector coherent_state(Complex alpha, int n_max, double leakage_tol) {
  if (n_max < 1) throw ParameterError("n_max must be >= 1");
  CVector c = raw_coherent(alpha, n_max);
  const double leakage = 1.0 - c.squaredNorm();
  if (leakage > leakage_tol) {
    throw TruncationError("coherent state |alpha|=" + std::to_string(std::abs(alpha)) +
                          " leaks " + std::to_string(leakage) + " beyond n_max=" +
                          std::to_string(n_max));
  }
  c.normalize();
  return c;
}

CVector spin_coherent_state(Complex z, int n_qubits, Representation rep) {
  if (n_qubits < 1) throw ParameterError("n_qubits must be >= 1");
  const double prefactor = std::pow(1.0 + std::norm(z), -0.5 * n_qubits);
  if (rep == Representation::Symmetric) {
    CVector c(n_qubits + 1);
    for (int k = 0; k <= n_qubits; ++k) {
      const double binom = std::exp(std::lgamma(n_qubits + 1.0) - std::lgamma(k + 1.0) -
                                    std::lgamma(n_qubits - k + 1.0));
      c(k) = prefactor * std::sqrt(binom) * integer_power(z, n_qubits - k);
    }
    return c;
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  CVector c(static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    c(static_cast<Eigen::Index>(s)) = prefactor * integer_power(z, n_qubits - std::popcount(s));
  }
  return c;
}

CVector spin_cat_state(Complex z, int n_qubits, CatParity parity, Representation rep) {
  const double sign = parity == CatParity::Plus ? 1.0 : -1.0;
  CVector c = spin_coherent_state(z, n_qubits, rep) + sign * spin_coherent_state(-z, n_qubits, rep);
  const double norm = c.norm();
  if (norm < kDegenerateNorm) {
    throw DegeneracyError("cat state with z=" + std::to_string(z.real()) + "+" +
                          std::to_string(z.imag()) + "i has vanishing norm");
  }
  return c / norm;
}

}  // namespace qsdcat
