#pragma once

#include "qotl/gates.hpp"
#include "qotl/qsim.hpp"
#include "qotl/statevector.hpp"

namespace qotl::ref {

/// Serial reference kernels, kept structurally independent of the parallel
/// path: gates are expanded to dense per-basis gathers instead of pair
/// updates. Used by tests and the benchmark as ground truth.
std::vector<cplx> apply_gate(const std::vector<cplx>& amps, int n, const Gate& g);

Statevector run_circuit(const CircuitSpec& spec, const LatentVector& z, AngleShift shift = {});

std::vector<double> basis_probabilities(const Statevector& sv);

double marginal_zero_prob(const std::vector<double>& probs, int n, int k);

}  // namespace qotl::ref
