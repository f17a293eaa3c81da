#include "qotl/qsim.hpp"

#include <algorithm>
#include <stdexcept>

#include "qotl/parallel.hpp"

namespace qotl {

namespace {

Gate rotation_gate(Axis axis, int q, double angle) {
  switch (axis) {
    case Axis::X: return Gate::rx(q, angle);
    case Axis::Y: return Gate::ry(q, angle);
    case Axis::Z: return Gate::rz(q, angle);
  }
  throw std::logic_error("rotation_gate: bad axis");
}

Gate entangler_gate(Entangler ent, int a, int b) {
  return ent == Entangler::CZ ? Gate::cz(a, b) : Gate::cx(a, b);
}

inline std::size_t insert_zero_bit(std::size_t i, int q) {
  const std::size_t low_mask = (std::size_t{1} << q) - 1;
  return ((i & ~low_mask) << 1) | (i & low_mask);
}

}  // namespace

void run_circuit_inplace(std::span<cplx> amps, const CircuitSpec& spec, const LatentVector& z,
                         AngleShift shift) {
  if (z.dim() != spec.latent_dim())
    throw std::invalid_argument("run_circuit: latent dimension mismatch");
  const int n = spec.qubits();
  for (int l = 0; l < spec.layers(); ++l) {
    for (int q = 0; q < n; ++q) {
      const int slot = l * n + q;
      double angle = spec.slot_angle(slot, z);
      if (slot == shift.slot) angle += shift.delta;
      apply_gate_inplace(amps, n, rotation_gate(spec.xi()[static_cast<std::size_t>(slot)], q, angle));
    }
    for (auto [a, b] : spec.entangler_pairs(l))
      apply_gate_inplace(amps, n, entangler_gate(spec.entangler(), a, b));
  }
}

Statevector run_circuit(const CircuitSpec& spec, const LatentVector& z, AngleShift shift) {
  Statevector sv = Statevector::zero_state(spec.qubits());
  run_circuit_inplace(sv.amps(), spec, z, shift);
  return sv;
}

void apply_inverse_circuit_inplace(std::span<cplx> amps, const CircuitSpec& spec,
                                   const LatentVector& z, AngleShift shift) {
  if (z.dim() != spec.latent_dim())
    throw std::invalid_argument("apply_inverse_circuit: latent dimension mismatch");
  const int n = spec.qubits();
  for (int l = spec.layers() - 1; l >= 0; --l) {
    auto pairs = spec.entangler_pairs(l);
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it)
      apply_gate_inplace(amps, n, entangler_gate(spec.entangler(), it->first, it->second));
    for (int q = 0; q < n; ++q) {
      const int slot = l * n + q;
      double angle = spec.slot_angle(slot, z);
      if (slot == shift.slot) angle += shift.delta;
      apply_gate_inplace(amps, n, rotation_gate(spec.xi()[static_cast<std::size_t>(slot)], q, -angle));
    }
  }
}

std::vector<double> basis_probabilities(const Statevector& sv) {
  std::vector<double> probs(sv.dim());
  const auto& amps = sv.amps();
  par::for_chunks(probs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) probs[i] = std::norm(amps[i]);
  });
  return probs;
}

double marginal_zero_prob(std::span<const double> probs, int n, int k) {
  if (k < 0 || k >= n || probs.size() != (std::size_t{1} << n))
    throw std::invalid_argument("marginal_zero_prob: bad arguments");
  const std::size_t half = probs.size() >> 1;
  return par::sum_chunked(half, [&](std::size_t i) { return probs[insert_zero_bit(i, k)]; });
}

ShotTable sample_shots(const Statevector& sv, std::uint32_t n_s, Rng& rng) {
  return sample_shots(std::span<const cplx>(sv.amps()), n_s, rng);
}

ShotTable sample_shots(std::span<const cplx> amps, std::uint32_t n_s, Rng& rng) {
  if (n_s == 0) throw std::invalid_argument("sample_shots: zero shots");
  std::vector<double> cdf(amps.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]);
    cdf[i] = acc;
  }
  std::vector<std::uint64_t> draws(n_s);
  for (auto& d : draws) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    d = it == cdf.end() ? cdf.size() - 1 : static_cast<std::uint64_t>(it - cdf.begin());
  }
  std::sort(draws.begin(), draws.end());
  ShotTable table;
  table.total = n_s;
  for (std::size_t i = 0; i < draws.size();) {
    std::size_t j = i;
    while (j < draws.size() && draws[j] == draws[i]) ++j;
    table.counts.emplace_back(draws[i], static_cast<std::uint32_t>(j - i));
    i = j;
  }
  return table;
}

double marginal_zero_prob(const ShotTable& shots, int k) {
  if (shots.total == 0) throw std::invalid_argument("marginal_zero_prob: empty table");
  std::uint64_t zeros = 0;
  for (const auto& [index, hits] : shots.counts)
    if (!(index & (std::uint64_t{1} << k))) zeros += hits;
  return static_cast<double>(zeros) / static_cast<double>(shots.total);
}

double all_zeros_fraction(const ShotTable& shots) {
  if (shots.total == 0) throw std::invalid_argument("all_zeros_fraction: empty table");
  if (!shots.counts.empty() && shots.counts.front().first == 0)
    return static_cast<double>(shots.counts.front().second) / static_cast<double>(shots.total);
  return 0.0;
}

}  // namespace qotl
