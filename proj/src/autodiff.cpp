#include "qotl/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qotl/parallel.hpp"

namespace qotl {

namespace {

constexpr double kShift = std::numbers::pi / 4.0;
constexpr double kCostClamp = 1e-8;
constexpr std::uint64_t kForwardTag = ~std::uint64_t{0};

// Sum over qubits of d p_k / d a for the local cost, or d F / d a for the
// global one, by the two-point rule on the slot's total angle.
double shifted_prob_sum(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                        int slot, const GroundCost& cost, const Rng& rng_base) {
  const AngleShift plus{slot, kShift};
  const AngleShift minus{slot, -kShift};
  if (cost.kind == GroundCost::Kind::Local) {
    std::vector<double> pp, pm;
    if (cost.exact()) {
      pp = local_marginals(psi, spec, z, plus);
      pm = local_marginals(psi, spec, z, minus);
    } else {
      Rng rp = rng_base.stream(2 * static_cast<std::uint64_t>(slot));
      Rng rm = rng_base.stream(2 * static_cast<std::uint64_t>(slot) + 1);
      pp = sampled_local_marginals(psi, spec, z, cost.shots, rp, plus);
      pm = sampled_local_marginals(psi, spec, z, cost.shots, rm, minus);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < pp.size(); ++k) acc += pp[k] - pm[k];
    return acc;
  }
  if (cost.exact())
    return model_fidelity(psi, spec, z, plus) - model_fidelity(psi, spec, z, minus);
  Rng rp = rng_base.stream(2 * static_cast<std::uint64_t>(slot));
  Rng rm = rng_base.stream(2 * static_cast<std::uint64_t>(slot) + 1);
  return sampled_model_fidelity(psi, spec, z, cost.shots, rp, plus) -
         sampled_model_fidelity(psi, spec, z, cost.shots, rm, minus);
}

// d c / d (sum of 1 - p terms): c = sqrt(mean gaps) gives -1/(2 n c), the
// trace-distance form gives -1/(2 c). Zero cost returns the zero subgradient.
double chain_prefactor(double forward_cost, int n, const GroundCost& cost) {
  if (forward_cost <= 0.0) return 0.0;
  const double c = forward_cost < kCostClamp ? kCostClamp : forward_cost;
  const double width = cost.kind == GroundCost::Kind::Local ? static_cast<double>(n) : 1.0;
  return -1.0 / (2.0 * width * c);
}

double forward_or_eval(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                       const GroundCost& cost, const Rng& rng_base, double forward_cost) {
  if (forward_cost >= 0.0) return forward_cost;
  Rng rng = rng_base.stream(kForwardTag);
  return ground_cost(psi, spec, z, cost, rng);
}

}  // namespace

double ground_cost_slot_grad(const Statevector& psi, const CircuitSpec& spec,
                             const LatentVector& z, int slot, const GroundCost& cost,
                             const Rng& rng_base, double forward_cost) {
  const double c = forward_or_eval(psi, spec, z, cost, rng_base, forward_cost);
  const double pre = chain_prefactor(c, spec.qubits(), cost);
  if (pre == 0.0) return 0.0;
  return pre * shifted_prob_sum(psi, spec, z, slot, cost, rng_base);
}

GradientResult ground_cost_grad(const Statevector& psi, const CircuitSpec& spec,
                                const LatentVector& z, Wrt wrt, const GroundCost& cost,
                                const Rng& rng_base, double forward_cost) {
  const double c = forward_or_eval(psi, spec, z, cost, rng_base, forward_cost);
  const double pre = chain_prefactor(c, spec.qubits(), cost);
  const int n_p = spec.param_count();

  GradientResult out;
  if (wrt == Wrt::Theta) {
    out.d.assign(static_cast<std::size_t>(n_p), 0.0);
    out.evals = 2ll * n_p;
    if (pre == 0.0) return out;
    par::for_each_index(n_p, [&](std::ptrdiff_t slot) {
      const double raw =
          shifted_prob_sum(psi, spec, z, static_cast<int>(slot), cost, rng_base);
      out.d[static_cast<std::size_t>(slot)] =
          pre * raw * z.feature(spec.eta()[static_cast<std::size_t>(slot)]);
    });
    return out;
  }

  out.d.assign(static_cast<std::size_t>(spec.latent_dim()), 0.0);
  std::vector<int> wired;
  for (int slot = 0; slot < n_p; ++slot)
    if (spec.eta()[static_cast<std::size_t>(slot)] >= 1) wired.push_back(slot);
  out.evals = 2ll * static_cast<std::int64_t>(wired.size());
  if (pre == 0.0 || wired.empty()) return out;
  std::vector<double> raw(wired.size(), 0.0);
  par::for_each_index(static_cast<std::ptrdiff_t>(wired.size()), [&](std::ptrdiff_t k) {
    raw[static_cast<std::size_t>(k)] =
        shifted_prob_sum(psi, spec, z, wired[static_cast<std::size_t>(k)], cost, rng_base);
  });
  // d a / d z_m = theta_slot on every slot wired to feature m.
  for (std::size_t k = 0; k < wired.size(); ++k) {
    const int slot = wired[k];
    const int m = spec.eta()[static_cast<std::size_t>(slot)];
    out.d[static_cast<std::size_t>(m - 1)] +=
        pre * raw[k] * spec.theta()[static_cast<std::size_t>(slot)];
  }
  return out;
}

GradientResult otl_theta_grad(const Ensemble& ensemble, const CircuitSpec& spec,
                              const std::vector<LatentVector>& zs, const TransportPlan& plan,
                              const CostMatrix& matrix, const GroundCost& cost,
                              const Rng& rng_base) {
  const int n_p = spec.param_count();
  const std::size_t support = plan.entries.size();
  std::vector<GradientResult> per_entry(support);
  par::for_each_index(static_cast<std::ptrdiff_t>(support), [&](std::ptrdiff_t e) {
    const auto& entry = plan.entries[static_cast<std::size_t>(e)];
    const Rng entry_rng =
        rng_base.stream(static_cast<std::uint64_t>(entry.i), static_cast<std::uint64_t>(entry.j));
    per_entry[static_cast<std::size_t>(e)] =
        ground_cost_grad(ensemble.states[static_cast<std::size_t>(entry.i)], spec,
                         zs[static_cast<std::size_t>(entry.j)], Wrt::Theta, cost, entry_rng,
                         matrix.at(entry.i, entry.j));
  });
  GradientResult out;
  out.d.assign(static_cast<std::size_t>(n_p), 0.0);
  for (std::size_t e = 0; e < support; ++e) {
    const double flow = plan.entries[e].flow;
    for (std::size_t s = 0; s < out.d.size(); ++s) out.d[s] += flow * per_entry[e].d[s];
    out.evals += per_entry[e].evals;
  }
  return out;
}

double fd_ground_cost_grad(const Statevector& psi, const CircuitSpec& spec, const LatentVector& z,
                           Wrt wrt, int index, double h, const GroundCost& cost) {
  if (!cost.exact())
    throw std::invalid_argument("fd_ground_cost_grad: finite differences need exact costs");
  Rng dummy(0);
  if (wrt == Wrt::Theta) {
    auto theta = spec.theta();
    theta[static_cast<std::size_t>(index)] += h;
    const double cp = ground_cost(psi, spec.with_theta(theta), z, cost, dummy);
    theta[static_cast<std::size_t>(index)] -= 2.0 * h;
    const double cm = ground_cost(psi, spec.with_theta(theta), z, cost, dummy);
    return (cp - cm) / (2.0 * h);
  }
  LatentVector zp = z, zm = z;
  zp.z[static_cast<std::size_t>(index)] += h;
  zm.z[static_cast<std::size_t>(index)] -= h;
  const double cp = ground_cost(psi, spec, zp, cost, dummy);
  const double cm = ground_cost(psi, spec, zm, cost, dummy);
  return (cp - cm) / (2.0 * h);
}

}  // namespace qotl
