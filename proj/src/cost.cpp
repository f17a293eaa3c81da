#include "qotl/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "qotl/parallel.hpp"

namespace qotl {

namespace {

// U(z)^dagger applied to a copy of psi, written into scratch.
void inverse_into(std::vector<cplx>& scratch, const Statevector& psi, const CircuitSpec& spec,
                  const LatentVector& z, AngleShift shift) {
  scratch = psi.amps();
  apply_inverse_circuit_inplace(scratch, spec, z, shift);
}

double marginals_to_cost(const std::vector<double>& p) {
  double acc = 0.0;
  for (double pk : p) acc += 1.0 - pk;
  acc /= static_cast<double>(p.size());
  return std::sqrt(acc > 0.0 ? acc : 0.0);
}

// Serial single pass; safe inside parallel chunk bodies.
std::vector<double> marginals_of(const std::vector<cplx>& amps, int n) {
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  for (std::size_t x = 0; x < amps.size(); ++x) {
    const double pr = std::norm(amps[x]);
    for (int k = 0; k < n; ++k)
      if (!(x & (std::size_t{1} << k))) p[static_cast<std::size_t>(k)] += pr;
  }
  return p;
}

// One-bit mass per qubit, accumulated directly so a near-perfect inversion
// yields a residual at the square of the amplitude error instead of the
// cancellation floor of 1 - p.
double mean_one_mass(const std::vector<cplx>& amps, int n) {
  std::vector<double> r(static_cast<std::size_t>(n), 0.0);
  for (std::size_t x = 1; x < amps.size(); ++x) {
    const double pr = std::norm(amps[x]);
    for (int k = 0; k < n; ++k)
      if (x & (std::size_t{1} << k)) r[static_cast<std::size_t>(k)] += pr;
  }
  double acc = 0.0;
  for (double rk : r) acc += rk;
  return acc / static_cast<double>(n);
}

// Everything outside |0...0>; the well-conditioned form of 1 - fidelity.
double tail_mass(const std::vector<cplx>& amps) {
  double acc = 0.0;
  for (std::size_t x = 1; x < amps.size(); ++x) acc += std::norm(amps[x]);
  return acc;
}

}  // namespace

double trace_distance(const Statevector& a, const Statevector& b) {
  const double f = fidelity(a, b);
  const double gap = 1.0 - f;
  return std::sqrt(gap > 0.0 ? gap : 0.0);
}

std::vector<double> local_marginals(const Statevector& psi, const CircuitSpec& spec,
                                    const LatentVector& z, AngleShift shift) {
  std::vector<cplx> scratch;
  inverse_into(scratch, psi, spec, z, shift);
  return marginals_of(scratch, spec.qubits());
}

std::vector<double> sampled_local_marginals(const Statevector& psi, const CircuitSpec& spec,
                                            const LatentVector& z, std::uint32_t n_s, Rng& rng,
                                            AngleShift shift) {
  std::vector<cplx> scratch;
  inverse_into(scratch, psi, spec, z, shift);
  const ShotTable table = sample_shots(std::span<const cplx>(scratch), n_s, rng);
  std::vector<double> p(static_cast<std::size_t>(spec.qubits()));
  for (int k = 0; k < spec.qubits(); ++k) p[static_cast<std::size_t>(k)] = marginal_zero_prob(table, k);
  return p;
}

double model_fidelity(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                      AngleShift shift) {
  std::vector<cplx> scratch;
  inverse_into(scratch, psi, spec, z, shift);
  return std::norm(scratch[0]);
}

double sampled_model_fidelity(const Statevector& psi, const CircuitSpec& spec,
                              const LatentVector& z, std::uint32_t n_s, Rng& rng,
                              AngleShift shift) {
  std::vector<cplx> scratch;
  inverse_into(scratch, psi, spec, z, shift);
  const ShotTable table = sample_shots(std::span<const cplx>(scratch), n_s, rng);
  return all_zeros_fraction(table);
}

double local_cost_exact(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z) {
  std::vector<cplx> scratch;
  inverse_into(scratch, psi, spec, z, {});
  return std::sqrt(mean_one_mass(scratch, spec.qubits()));
}

double local_cost_sampled(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                          std::uint32_t n_s, Rng& rng) {
  return marginals_to_cost(sampled_local_marginals(psi, spec, z, n_s, rng));
}

double ground_cost(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                   const GroundCost& cost, Rng& rng, AngleShift shift) {
  if (cost.kind == GroundCost::Kind::Local) {
    if (cost.exact()) {
      std::vector<cplx> scratch;
      inverse_into(scratch, psi, spec, z, shift);
      return std::sqrt(mean_one_mass(scratch, spec.qubits()));
    }
    return marginals_to_cost(sampled_local_marginals(psi, spec, z, cost.shots, rng, shift));
  }
  if (cost.exact()) {
    std::vector<cplx> scratch;
    inverse_into(scratch, psi, spec, z, shift);
    return std::sqrt(tail_mass(scratch));
  }
  const double f = sampled_model_fidelity(psi, spec, z, cost.shots, rng, shift);
  const double gap = 1.0 - f;
  return std::sqrt(gap > 0.0 ? gap : 0.0);
}

CostMatrix cost_matrix(const Ensemble& ensemble, const CircuitSpec& spec,
                       const std::vector<LatentVector>& zs, const GroundCost& cost,
                       const Rng& rng_base) {
  const int rows = ensemble.size();
  const int cols = static_cast<int>(zs.size());
  if (rows == 0 || cols == 0) throw std::invalid_argument("cost_matrix: empty side");
  CostMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.v.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  const std::size_t total = m.v.size();
  par::for_chunks(total, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const int i = static_cast<int>(e / static_cast<std::size_t>(cols));
      const int j = static_cast<int>(e % static_cast<std::size_t>(cols));
      Rng entry_rng = rng_base.stream(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      m.v[e] = ground_cost(ensemble.states[static_cast<std::size_t>(i)], spec,
                           zs[static_cast<std::size_t>(j)], cost, entry_rng);
    }
  });
  return m;
}

}  // namespace qotl
