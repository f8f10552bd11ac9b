#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qsdcat/config.hpp"
#include "qsdcat/errors.hpp"
#include "qsdcat/model.hpp"
#include "qsdcat/observe.hpp"
#include "qsdcat/oracle.hpp"
#include "reference.hpp"

using namespace qsdcat;

namespace {

StateVector jc_initial(double nbar, int n_max) {
  const SpaceSpec s(n_max, 1);
  CVector excited = CVector::Zero(2);
  excited(1) = 1.0;
  return embed_product(coherent_state(std::sqrt(nbar), n_max), excited, s);
}

}  // namespace

TEST(DensityMatrix, PureState) {
  const auto rho = DensityMatrix::from_pure(jc_initial(2.0, 12));
  EXPECT_TRUE(rho.is_physical());
  EXPECT_NEAR(rho.purity(), 1.0, 1e-12);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  EXPECT_THROW(DensityMatrix(SpaceSpec(3, 1), Eigen::MatrixXcd::Identity(3, 3)), StructuralError);
}

TEST(Schrodinger, DiagonalPhases) {
  const SpaceSpec s(4, 1);
  const auto h = build_free_hamiltonian({.omega = 1.3, .g = 1.0, .n_qubits = 1}, s);
  CVector v = CVector::Constant(static_cast<Eigen::Index>(s.dim()), 1.0);
  const StateVector psi(s, v.normalized());
  const double dt = 1e-3, t = 2.0;
  const auto out = schrodinger_evolve(psi, h, dt, t, 2000);
  ASSERT_EQ(out.size(), 2u);
  const Eigen::MatrixXcd hd = h.dense();
  for (Eigen::Index k = 0; k < hd.rows(); ++k) {
    const Complex expected = psi.amplitudes()(k) * std::exp(Complex(0.0, -hd(k, k).real() * t));
    EXPECT_NEAR(std::abs(out.back().amplitudes()(k) - expected), 0.0, 1e-8);
  }
}

TEST(Schrodinger, ConservesEnergyAndMatchesPropagator) {
  // omega = 0: the interaction-frame Hamiltonian. With omega = 10 the lab-frame
  // phase error of RK4 at this dt is ~1e-7 relative.
  const ModelParams p{.omega = 0.0, .g = 1.0, .n_qubits = 2};
  const SpaceSpec s(15, 2);
  const auto h = build_hamiltonian(p, s);
  const auto psi = embed_product(coherent_state(2.0, 15, 1e-5),
                                 spin_cat_state(1.0, 2, CatParity::Minus, s.representation()), s);
  const double dt = timescales(p, 4.0).rabi / 2000.0;
  const auto out = schrodinger_evolve(psi, h, dt, 1.0, 100);
  const double e0 = expectation(psi, h).real();
  for (const auto& st : out) EXPECT_NEAR(expectation(st, h).real(), e0, 1e-8);
  const CVector exact = ref::unitary_propagator(h.dense(), dt * 100 * (out.size() - 1)) *
                        psi.amplitudes();
  EXPECT_LT((out.back().amplitudes() - exact).norm(), 1e-7);
}

TEST(Schrodinger, DimensionCap) {
  const SpaceSpec big(2500, 1);
  CVector v = CVector::Zero(static_cast<Eigen::Index>(big.dim()));
  v(0) = 1.0;
  EXPECT_THROW(schrodinger_evolve(StateVector(big, v), identity(big), 0.1, 1.0), CapacityError);
}

TEST(Lindblad, UnmeasuredStaysPureAndMatchesSchrodinger) {
  const ModelParams p{.omega = 10.0, .g = 1.0, .n_qubits = 2};
  const SpaceSpec s(12, 2);
  const auto h = build_hamiltonian(p, s);
  const auto psi = embed_product(coherent_state(1.5, 12, 1e-5),
                                 spin_coherent_state(0.8, 2, s.representation()), s);
  const auto zero = Complex(0.0) * build_field_ops(s).annihilation;
  const double dt = 5e-4;
  const auto rho = lindblad_evolve(DensityMatrix::from_pure(psi), h, zero, dt, 1.0, 200);
  const auto pure = schrodinger_evolve(psi, h, dt, 1.0, 200);
  ASSERT_EQ(rho.size(), pure.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    EXPECT_NEAR(rho[i].purity(), 1.0, 1e-8);
    const Eigen::MatrixXcd proj = pure[i].amplitudes() * pure[i].amplitudes().adjoint();
    // Same RK4 on both sides; they differ only by the per-step renormalization.
    EXPECT_LT((rho[i].entries() - proj).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(Lindblad, DampedFieldAmplitude) {
  const double gamma = 0.05;
  const double alpha = 2.0;
  const ModelParams p{.omega = 3.0, .g = 1.0, .n_qubits = 1};
  const SpaceSpec s(20, 1);
  // g = 0: field-only evolution with spins frozen in |g>.
  const auto h = build_free_hamiltonian(p, s);
  const auto f = build_field_ops(s);
  CVector ground = CVector::Zero(2);
  ground(0) = 1.0;
  const auto psi = embed_product(coherent_state(alpha, 20), ground, s);
  const double dt = 5e-4;
  const auto rho = lindblad_evolve(DensityMatrix::from_pure(psi), h,
                                   Complex(std::sqrt(2 * gamma)) * f.annihilation, dt, 5.0, 1000);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double t = static_cast<double>(i) * 1000 * dt;
    EXPECT_NEAR(std::abs(rho[i].expectation(f.annihilation)), alpha * std::exp(-gamma * t), 1e-6);
    EXPECT_TRUE(rho[i].is_physical()) << i;
  }
}

TEST(Lindblad, TracePreserved) {
  const ModelParams p{.omega = 10.0, .g = 1.0, .n_qubits = 2};
  const SpaceSpec s(20, 2);
  const auto ts = timescales(p, 4.0);
  const auto psi = embed_product(coherent_state(2.0, 20),
                                 spin_cat_state(1.0, 2, CatParity::Minus, s.representation()), s);
  const auto rho = lindblad_evolve(DensityMatrix::from_pure(psi), build_hamiltonian(p, s),
                                   Complex(std::sqrt(0.01)) * build_field_ops(s).annihilation,
                                   ts.rabi / 2000.0, ts.first_revival, 400);
  for (const auto& r : rho) EXPECT_NEAR(r.trace().real(), 1.0, 1e-8);
}

TEST(JcAnalytic, Landmarks) {
  const double nbar = 10.0;
  const auto ts = timescales({.omega = 0.0, .g = 1.0, .n_qubits = 1}, nbar);
  const std::vector<double> t0{0.0, 3.0 * ts.collapse};
  const auto pe = jc_analytic_pe(nbar, 1.0, t0);
  EXPECT_NEAR(pe[0], 1.0, 1e-12);
  EXPECT_LT(std::abs(pe[1] - 0.5), 0.05);

  std::vector<double> window;
  for (double t = 0.8 * ts.revival; t <= 1.2 * ts.revival; t += 0.01) window.push_back(t);
  double swing = 0.0;
  for (double v : jc_analytic_pe(nbar, 1.0, window)) swing = std::max(swing, std::abs(v - 0.5));
  EXPECT_GT(swing, 0.2);
  EXPECT_THROW(jc_analytic_pe(0.0, 1.0, t0), ParameterError);
}

TEST(JcAnalytic, MatchesDenseDiagonalization) {
  const double nbar = 10.0;
  const int n_max = 60;
  const auto psi = jc_initial(nbar, n_max);
  const Eigen::MatrixXcd h = ref::tavis_cummings(n_max, 1, 0.0, 1.0);
  for (double t : {0.7, 5.0, 19.0}) {
    const CVector out = ref::unitary_propagator(h, t) * psi.amplitudes();
    double pe = 0.0;
    for (int n = 0; n <= n_max; ++n) pe += std::norm(out(2 * n + 1));
    EXPECT_NEAR(jc_analytic_pe(nbar, 1.0, std::vector<double>{t})[0], pe, 1e-9) << t;
  }
}

TEST(CrossRepresentation, SmallSystems) {
  auto config = parse_config("model: {n_qubits: 2, alpha: 2.0}\nspace: {n_max: 15}\n");
  const auto default_size = cross_representation_check(config);
  EXPECT_TRUE(default_size.passed);
  EXPECT_LT(default_size.max_dev_photon_number, 1e-8);

  config = parse_config("model: {n_qubits: 2, alpha: 1.5}\nspace: {n_max: 15}\n");
  const auto report = cross_representation_check(config);
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.max_dev_jz, 1e-8);

  config = parse_config("model: {n_qubits: 1, alpha: 1.5}\nspace: {n_max: 15}\n");
  const auto single = cross_representation_check(config);
  EXPECT_EQ(single.max_dev_p_all_ground, 0.0);
  EXPECT_EQ(single.max_dev_jz, 0.0);

  config = parse_config("model: {n_qubits: 5, alpha: 1.5}\nspace: {n_max: 15}\n");
  EXPECT_THROW(cross_representation_check(config), CapacityError);
}
