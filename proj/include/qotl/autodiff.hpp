#pragma once

#include <cstdint>
#include <vector>

#include "qotl/cost.hpp"
#include "qotl/transport.hpp"

namespace qotl {

/// Differentiation target: the trainable angles theta, or the latent point z.
enum class Wrt { Theta, Z };

struct GradientResult {
  std::vector<double> d;
  std::int64_t evals = 0;  // shifted model evaluations consumed
};

/// d(ground cost)/d(total angle of one slot) via the two-point rule at
/// +- pi/4: with R_P(a) = exp(-i a P), d p / d a = p(a + pi/4) - p(a - pi/4).
/// forward_cost is the already-known cost value used in the chain factor
/// 1/(2 c); pass a negative value to have it evaluated internally.
double ground_cost_slot_grad(const Statevector& psi, const CircuitSpec& spec,
                             const LatentVector& z, int slot, const GroundCost& cost,
                             const Rng& rng_base, double forward_cost);

/// Full gradient of one ground-cost entry. Wrt::Theta has one component per
/// slot; Wrt::Z has one per latent feature, accumulating theta-weighted slot
/// derivatives over every slot wired to that feature.
GradientResult ground_cost_grad(const Statevector& psi, const CircuitSpec& spec,
                                const LatentVector& z, Wrt wrt, const GroundCost& cost,
                                const Rng& rng_base, double forward_cost = -1.0);

/// Gradient of the transport loss at a fixed optimal plan: the plan support
/// is held constant and each supported entry contributes flow * d c_ij.
/// Shifted evaluations at entry (i, j) draw from rng_base.stream(i, j, ...).
GradientResult otl_theta_grad(const Ensemble& ensemble, const CircuitSpec& spec,
                              const std::vector<LatentVector>& zs, const TransportPlan& plan,
                              const CostMatrix& matrix, const GroundCost& cost,
                              const Rng& rng_base);

/// Central finite difference on exact costs; test and selftest oracle.
double fd_ground_cost_grad(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                           Wrt wrt, int index, double h, const GroundCost& cost);

}  // namespace qotl
