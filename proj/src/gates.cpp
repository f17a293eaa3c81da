#include "qotl/gates.hpp"

#include <cmath>
#include <stdexcept>

#include "qotl/parallel.hpp"

namespace qotl {

namespace {

// Pairs over one qubit stay below this: run serially, the fork overhead
// dominates at small dimensions.
constexpr std::size_t kParallelCutoff = 1u << 12;

inline std::size_t insert_zero_bit(std::size_t i, int q) {
  const std::size_t low_mask = (std::size_t{1} << q) - 1;
  return ((i & ~low_mask) << 1) | (i & low_mask);
}

template <class Body>
void pair_loop(std::size_t half, Body&& body) {
  if (half < kParallelCutoff) {
    for (std::size_t i = 0; i < half; ++i) body(i);
  } else {
    par::for_each_index(static_cast<std::ptrdiff_t>(half),
                        [&](std::ptrdiff_t i) { body(static_cast<std::size_t>(i)); });
  }
}

void apply_rotation(std::span<cplx> amps, int n, int q, GateKind kind, double angle) {
  const std::size_t half = std::size_t{1} << (n - 1);
  const std::size_t bit = std::size_t{1} << q;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  switch (kind) {
    case GateKind::RX:
      pair_loop(half, [&](std::size_t i) {
        const std::size_t x0 = insert_zero_bit(i, q);
        const std::size_t x1 = x0 | bit;
        const cplx a0 = amps[x0];
        const cplx a1 = amps[x1];
        amps[x0] = c * a0 + cplx{0.0, -s} * a1;
        amps[x1] = cplx{0.0, -s} * a0 + c * a1;
      });
      break;
    case GateKind::RY:
      pair_loop(half, [&](std::size_t i) {
        const std::size_t x0 = insert_zero_bit(i, q);
        const std::size_t x1 = x0 | bit;
        const cplx a0 = amps[x0];
        const cplx a1 = amps[x1];
        amps[x0] = c * a0 - s * a1;
        amps[x1] = s * a0 + c * a1;
      });
      break;
    case GateKind::RZ: {
      const cplx e0{c, -s};
      const cplx e1{c, s};
      pair_loop(half, [&](std::size_t i) {
        const std::size_t x0 = insert_zero_bit(i, q);
        const std::size_t x1 = x0 | bit;
        amps[x0] *= e0;
        amps[x1] *= e1;
      });
      break;
    }
    default:
      throw std::logic_error("apply_rotation: not a rotation");
  }
}

}  // namespace

void apply_gate_inplace(std::span<cplx> amps, int n, const Gate& g) {
  if (g.q0 < 0 || g.q0 >= n || (g.q1 >= 0 && (g.q1 >= n || g.q1 == g.q0)))
    throw std::invalid_argument("apply_gate_inplace: qubit index out of range");
  switch (g.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      apply_rotation(amps, n, g.q0, g.kind, g.angle);
      break;
    case GateKind::CZ: {
      const std::size_t m = (std::size_t{1} << g.q0) | (std::size_t{1} << g.q1);
      const std::size_t dim = amps.size();
      if (dim < kParallelCutoff) {
        for (std::size_t x = 0; x < dim; ++x)
          if ((x & m) == m) amps[x] = -amps[x];
      } else {
        par::for_each_index(static_cast<std::ptrdiff_t>(dim), [&](std::ptrdiff_t x) {
          const auto ux = static_cast<std::size_t>(x);
          if ((ux & m) == m) amps[ux] = -amps[ux];
        });
      }
      break;
    }
    case GateKind::CX: {
      const std::size_t cbit = std::size_t{1} << g.q0;
      const std::size_t tbit = std::size_t{1} << g.q1;
      pair_loop(amps.size() >> 1, [&](std::size_t i) {
        const std::size_t x0 = insert_zero_bit(i, g.q1);
        if (x0 & cbit) std::swap(amps[x0], amps[x0 | tbit]);
      });
      break;
    }
  }
}

Statevector apply_gate(const Statevector& sv, const Gate& g) {
  Statevector out = sv;
  apply_gate_inplace(out.amps(), sv.qubits(), g);
  return out;
}

}  // namespace qotl
