#include "qotl/reference.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qotl::ref {

namespace {

std::array<std::array<cplx, 2>, 2> one_qubit_matrix(const Gate& g) {
  const double c = std::cos(g.angle);
  const double s = std::sin(g.angle);
  switch (g.kind) {
    case GateKind::RX:
      return {{{cplx{c, 0}, cplx{0, -s}}, {cplx{0, -s}, cplx{c, 0}}}};
    case GateKind::RY:
      return {{{cplx{c, 0}, cplx{-s, 0}}, {cplx{s, 0}, cplx{c, 0}}}};
    case GateKind::RZ:
      return {{{cplx{c, -s}, cplx{0, 0}}, {cplx{0, 0}, cplx{c, s}}}};
    default:
      throw std::logic_error("one_qubit_matrix: not a rotation");
  }
}

// 4x4 matrix over (bit q0, bit q1), row-major with index b1 * 2 + b0.
std::array<std::array<cplx, 4>, 4> two_qubit_matrix(const Gate& g) {
  std::array<std::array<cplx, 4>, 4> u{};
  for (int i = 0; i < 4; ++i) u[i][i] = cplx{1, 0};
  if (g.kind == GateKind::CZ) {
    u[3][3] = cplx{-1, 0};
  } else if (g.kind == GateKind::CX) {
    // control set: swap the target bit rows |c=1,t=0> <-> |c=1,t=1>.
    u[1][1] = u[3][3] = cplx{0, 0};
    u[1][3] = u[3][1] = cplx{1, 0};
  } else {
    throw std::logic_error("two_qubit_matrix: not a two-qubit gate");
  }
  return u;
}

}  // namespace

std::vector<cplx> apply_gate(const std::vector<cplx>& amps, int n, const Gate& g) {
  const std::size_t dim = amps.size();
  std::vector<cplx> out(dim, cplx{0, 0});
  if (g.is_rotation()) {
    const auto u = one_qubit_matrix(g);
    const std::size_t bit = std::size_t{1} << g.q0;
    for (std::size_t x = 0; x < dim; ++x) {
      const int row = (x & bit) ? 1 : 0;
      for (int col = 0; col < 2; ++col) {
        const std::size_t src = col ? (x | bit) : (x & ~bit);
        out[x] += u[row][col] * amps[src];
      }
    }
  } else {
    const auto u = two_qubit_matrix(g);
    const std::size_t bit0 = std::size_t{1} << g.q0;
    const std::size_t bit1 = std::size_t{1} << g.q1;
    for (std::size_t x = 0; x < dim; ++x) {
      const int row = ((x & bit1) ? 2 : 0) | ((x & bit0) ? 1 : 0);
      for (int col = 0; col < 4; ++col) {
        std::size_t src = x & ~(bit0 | bit1);
        if (col & 1) src |= bit0;
        if (col & 2) src |= bit1;
        out[x] += u[row][col] * amps[src];
      }
    }
  }
  return out;
}

Statevector run_circuit(const CircuitSpec& spec, const LatentVector& z, AngleShift shift) {
  const int n = spec.qubits();
  std::vector<cplx> amps(std::size_t{1} << n, cplx{0, 0});
  amps[0] = cplx{1, 0};
  for (int l = 0; l < spec.layers(); ++l) {
    for (int q = 0; q < n; ++q) {
      const int slot = l * n + q;
      double angle = spec.slot_angle(slot, z);
      if (slot == shift.slot) angle += shift.delta;
      Gate g{GateKind::RX, q, -1, angle};
      switch (spec.xi()[static_cast<std::size_t>(slot)]) {
        case Axis::X: g.kind = GateKind::RX; break;
        case Axis::Y: g.kind = GateKind::RY; break;
        case Axis::Z: g.kind = GateKind::RZ; break;
      }
      amps = apply_gate(amps, n, g);
    }
    for (auto [a, b] : spec.entangler_pairs(l)) {
      const Gate g = spec.entangler() == Entangler::CZ ? Gate::cz(a, b) : Gate::cx(a, b);
      amps = apply_gate(amps, n, g);
    }
  }
  return Statevector::from_amplitudes(n, std::move(amps));
}

std::vector<double> basis_probabilities(const Statevector& sv) {
  std::vector<double> probs(sv.dim());
  for (std::size_t i = 0; i < sv.dim(); ++i) probs[i] = std::norm(sv.amp(i));
  return probs;
}

double marginal_zero_prob(const std::vector<double>& probs, int n, int k) {
  if (k < 0 || k >= n) throw std::invalid_argument("marginal_zero_prob: bad qubit");
  double p = 0.0;
  for (std::size_t x = 0; x < probs.size(); ++x)
    if (!(x & (std::size_t{1} << k))) p += probs[x];
  return p;
}

}  // namespace qotl::ref
