#include <benchmark/benchmark.h>

#include <vector>

#include "qotl/ansatz.hpp"
#include "qotl/cost.hpp"
#include "qotl/gates.hpp"
#include "qotl/qsim.hpp"
#include "qotl/reference.hpp"
#include "qotl/rng.hpp"
#include "qotl/transport.hpp"

namespace {

using namespace qotl;

Statevector random_state(int n, Rng& rng) {
  std::vector<cplx> amps(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : amps) {
    a = cplx{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
    norm += std::norm(a);
  }
  norm = std::sqrt(norm);
  for (auto& a : amps) a /= norm;
  return Statevector::from_amplitudes(n, std::move(amps));
}

void BM_gate_parallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(11);
  Statevector sv = random_state(n, rng);
  const Gate g = Gate::ry(n / 2, 0.3);
  for (auto _ : state) {
    apply_gate_inplace(sv.amps(), n, g);
    benchmark::DoNotOptimize(sv.amps().data());
  }
}

void BM_gate_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(11);
  const Statevector sv = random_state(n, rng);
  std::vector<cplx> amps(sv.amps().begin(), sv.amps().end());
  const Gate g = Gate::ry(n / 2, 0.3);
  for (auto _ : state) {
    amps = ref::apply_gate(amps, n, g);
    benchmark::DoNotOptimize(amps.data());
  }
}

void BM_circuit_parallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(12);
  const CircuitSpec spec = build_hea(n, 5, 1, Entangler::CZ, rng);
  auto zs = sample_latent_batch(1, 1, rng);
  for (auto _ : state) {
    Statevector sv = run_circuit(spec, zs[0]);
    benchmark::DoNotOptimize(sv.amps().data());
  }
}

void BM_circuit_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(12);
  const CircuitSpec spec = build_hea(n, 5, 1, Entangler::CZ, rng);
  auto zs = sample_latent_batch(1, 1, rng);
  for (auto _ : state) {
    Statevector sv = ref::run_circuit(spec, zs[0]);
    benchmark::DoNotOptimize(sv.amps().data());
  }
}

void BM_marginals_parallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(13);
  const Statevector sv = random_state(n, rng);
  const auto probs = basis_probabilities(sv);
  for (auto _ : state) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += marginal_zero_prob(probs, n, k);
    benchmark::DoNotOptimize(acc);
  }
}

void BM_marginals_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(13);
  const Statevector sv = random_state(n, rng);
  const auto probs = basis_probabilities(sv);
  for (auto _ : state) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += ref::marginal_zero_prob(probs, n, k);
    benchmark::DoNotOptimize(acc);
  }
}

void BM_cost_matrix(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = 6;
  Rng rng(14);
  const CircuitSpec spec = build_hea(n, 3, 1, Entangler::CZ, rng);
  const Ensemble ens = gen_equator_ensemble(n, m, rng);
  auto zs = sample_latent_batch(1, m, rng);
  const Rng mat_rng = rng.stream(1);
  for (auto _ : state) {
    CostMatrix c = cost_matrix(ens, spec, zs, GroundCost::exact_local(), mat_rng);
    benchmark::DoNotOptimize(c.v.data());
  }
}

void BM_ot_solve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Rng rng(15);
  CostMatrix cost;
  cost.rows = cost.cols = m;
  cost.v.resize(static_cast<std::size_t>(m) * m);
  for (double& c : cost.v) c = rng.uniform();
  for (auto _ : state) {
    OtSolution s = solve_ot_uniform(cost);
    benchmark::DoNotOptimize(s.loss);
  }
}

}  // namespace

BENCHMARK(BM_gate_parallel)->Arg(10)->Arg(14)->Arg(18);
BENCHMARK(BM_gate_serial)->Arg(10)->Arg(14)->Arg(18);
BENCHMARK(BM_circuit_parallel)->Arg(10)->Arg(14);
BENCHMARK(BM_circuit_serial)->Arg(10)->Arg(14);
BENCHMARK(BM_marginals_parallel)->Arg(14)->Arg(18);
BENCHMARK(BM_marginals_serial)->Arg(14)->Arg(18);
BENCHMARK(BM_cost_matrix)->Arg(16)->Arg(64);
BENCHMARK(BM_ot_solve)->Arg(64)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
