#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qotl/ansatz.hpp"
#include "qotl/gates.hpp"
#include "qotl/rng.hpp"
#include "qotl/statevector.hpp"

namespace qotl {

/// Additive offset on one slot's total rotation angle; slot -1 is a no-op.
/// Used by the parameter-shift rule, which evaluates at total angle +- pi/4.
struct AngleShift {
  int slot = -1;
  double delta = 0.0;
};

/// U(z, theta)|psi>: per layer, rotations on every qubit then the entangler.
void run_circuit_inplace(std::span<cplx> amps, const CircuitSpec& spec, const LatentVector& z,
                         AngleShift shift = {});

Statevector run_circuit(const CircuitSpec& spec, const LatentVector& z, AngleShift shift = {});

/// U(z, theta)^dagger |psi>: layers reversed, inverse entangler before the
/// negated rotations of each layer.
void apply_inverse_circuit_inplace(std::span<cplx> amps, const CircuitSpec& spec,
                                   const LatentVector& z, AngleShift shift = {});

std::vector<double> basis_probabilities(const Statevector& sv);

/// P(qubit k = 0) from a probability vector over 2^n outcomes.
double marginal_zero_prob(std::span<const double> probs, int n, int k);

/// Multinomial sample of n_s basis outcomes; sparse counts.
struct ShotTable {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> counts;  // (basis index, hits), index-sorted
  std::uint32_t total = 0;
};

ShotTable sample_shots(const Statevector& sv, std::uint32_t n_s, Rng& rng);
ShotTable sample_shots(std::span<const cplx> amps, std::uint32_t n_s, Rng& rng);

/// P(qubit k = 0) from counts.
double marginal_zero_prob(const ShotTable& shots, int k);

/// Fraction of shots equal to |0...0>.
double all_zeros_fraction(const ShotTable& shots);

}  // namespace qotl
