#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "qsdcat/config.hpp"
#include "qsdcat/oracle.hpp"
#include "qsdcat/qsd.hpp"
#include "qsdcat/wavelet.hpp"

namespace {

qsdcat::SimConfig five_qubit_config(double gamma) {
  qsdcat::ConfigOverrides o;
  o.gamma = gamma;
  return qsdcat::parse_config("model: {n_qubits: 5, alpha: 5.0, z: 1.0}\n", o);
}

void BM_QsdStep(benchmark::State& state) {
  const auto config = five_qubit_config(5e-3);
  const auto space = config.space_spec();
  const auto h = qsdcat::build_coupling_hamiltonian(config.model, space);
  const auto l = std::sqrt(2.0 * 5e-3) * qsdcat::build_field_ops(space).annihilation;
  qsdcat::QsdIntegrator integrator(h, l);
  qsdcat::WienerStream stream(1, 0);
  auto psi = qsdcat::prepare_initial_state(config).amplitudes();
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrator.step(psi, config.integration.dt,
                                             stream.draw(config.integration.dt)));
  }
  state.SetLabel("dim=" + std::to_string(space.dim()));
}
BENCHMARK(BM_QsdStep);

void BM_Cwt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> signal(n);
  for (std::size_t i = 0; i < n; ++i) signal[i] = std::cos(0.05 * static_cast<double>(i));
  const qsdcat::WaveletParams params;
  for (auto _ : state) benchmark::DoNotOptimize(qsdcat::cwt(signal, 1.0, params));
}
BENCHMARK(BM_Cwt)->Arg(1024)->Arg(4096);

void BM_LindbladStep(benchmark::State& state) {
  const auto config = qsdcat::parse_config(
      "model: {n_qubits: 2, alpha: 2.0}\nspace: {n_max: 20}\nmeasurement: {gamma: 0.005}\n");
  const auto space = config.space_spec();
  const auto rho = qsdcat::DensityMatrix::from_pure(qsdcat::prepare_initial_state(config));
  const auto h = qsdcat::build_hamiltonian(config.model, space);
  const auto l = std::sqrt(0.01) * qsdcat::build_field_ops(space).annihilation;
  for (auto _ : state) benchmark::DoNotOptimize(qsdcat::lindblad_evolve(rho, h, l, 1e-3, 1e-2, 10));
}
BENCHMARK(BM_LindbladStep);

}  // namespace
BENCHMARK_MAIN();
