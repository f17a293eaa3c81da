#pragma once

#include <cstdint>
#include <vector>

#include "qotl/ansatz.hpp"
#include "qotl/qsim.hpp"
#include "qotl/rng.hpp"
#include "qotl/statevector.hpp"

namespace qotl {

/// Ground cost between a data state and a model point (spec, z).
/// shots == 0 selects exact statevector evaluation.
struct GroundCost {
  enum class Kind { Global, Local };
  Kind kind = Kind::Local;
  std::uint32_t shots = 0;

  static GroundCost exact_local() { return {Kind::Local, 0}; }
  static GroundCost exact_global() { return {Kind::Global, 0}; }
  static GroundCost sampled_local(std::uint32_t n_s) { return {Kind::Local, n_s}; }
  static GroundCost sampled_global(std::uint32_t n_s) { return {Kind::Global, n_s}; }
  bool exact() const { return shots == 0; }
};

/// sqrt(1 - |<a|b>|^2) for pure states.
double trace_distance(const Statevector& a, const Statevector& b);

/// P(qubit k = 0) of U(z)^dagger |psi| for every k; the inversion-test view.
std::vector<double> local_marginals(const Statevector& psi, const CircuitSpec& spec,
                                    const LatentVector& z, AngleShift shift = {});
std::vector<double> sampled_local_marginals(const Statevector& psi, const CircuitSpec& spec,
                                            const LatentVector& z, std::uint32_t n_s, Rng& rng,
                                            AngleShift shift = {});

/// |<psi| U(z) |0...0>|^2.
double model_fidelity(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                      AngleShift shift = {});
double sampled_model_fidelity(const Statevector& psi, const CircuitSpec& spec,
                              const LatentVector& z, std::uint32_t n_s, Rng& rng,
                              AngleShift shift = {});

/// sqrt(mean_k(1 - p_k)) with the marginals of the inversion test.
double local_cost_exact(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z);
/// Same, with all n marginals read from one shot table of n_s samples.
double local_cost_sampled(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                          std::uint32_t n_s, Rng& rng);

/// Dispatch on kind/shots; rng is consumed only by sampled evaluations.
double ground_cost(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                   const GroundCost& cost, Rng& rng, AngleShift shift = {});

struct CostMatrix {
  int rows = 0, cols = 0;
  std::vector<double> v;  // row-major

  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
};

/// c[i][j] = ground cost between ensemble state i and model point z_j.
/// Sampled entries draw from the child stream rng_base.stream(i, j), so the
/// matrix is independent of evaluation order.
CostMatrix cost_matrix(const Ensemble& ensemble, const CircuitSpec& spec,
                       const std::vector<LatentVector>& zs, const GroundCost& cost,
                       const Rng& rng_base);

}  // namespace qotl
