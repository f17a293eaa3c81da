#pragma once

#include <span>

#include "qotl/statevector.hpp"

namespace qotl {

enum class GateKind { RX, RY, RZ, CZ, CX };

/// Rotation convention: R_P(a) = exp(-i a P), so RX(a) mixes with cos(a) and
/// -i sin(a) and the probability parameter-shift step is pi/4.
struct Gate {
  GateKind kind;
  int q0 = -1;     // rotation target / CZ first qubit / CX control
  int q1 = -1;     // CZ second qubit / CX target; -1 for single-qubit gates
  double angle = 0.0;

  static Gate rx(int q, double a) { return {GateKind::RX, q, -1, a}; }
  static Gate ry(int q, double a) { return {GateKind::RY, q, -1, a}; }
  static Gate rz(int q, double a) { return {GateKind::RZ, q, -1, a}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, a, b, 0.0}; }
  static Gate cx(int control, int target) { return {GateKind::CX, control, target, 0.0}; }

  bool is_rotation() const { return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ; }
};

/// In-place application, parallel over amplitude pairs.
void apply_gate_inplace(std::span<cplx> amps, int n, const Gate& g);

Statevector apply_gate(const Statevector& sv, const Gate& g);

}  // namespace qotl
