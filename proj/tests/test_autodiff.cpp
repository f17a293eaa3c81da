#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "qotl/autodiff.hpp"
#include "qotl/rng.hpp"
#include "qotl/transport.hpp"

using namespace qotl;
using Catch::Matchers::WithinAbs;

namespace {

CircuitSpec random_spec(int n, Rng& rng) {
  const int layers = 2 + static_cast<int>(rng.below(2));
  const int n_z = 1 + static_cast<int>(rng.below(2));
  const Entangler ent = rng.below(2) == 0 ? Entangler::CZ : Entangler::CX;
  if (rng.below(2) == 0) return build_hea(n, layers, n_z, ent, rng);
  return build_ala(n, layers, n_z, 2, ent, rng);
}

}  // namespace

TEST_CASE("angle gradients match finite differences", "[autodiff]") {
  Rng rng(31);
  const Rng unused(0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(2));
    const CircuitSpec spec = random_spec(n, rng);
    const Statevector psi = gen_hard_target_ensemble(n, 1, rng).states[0];
    auto zs = sample_latent_batch(spec.latent_dim(), 1, rng);
    for (const GroundCost& cost : {GroundCost::exact_local(), GroundCost::exact_global()}) {
      const GradientResult g = ground_cost_grad(psi, spec, zs[0], Wrt::Theta, cost, unused);
      REQUIRE(g.d.size() == static_cast<std::size_t>(spec.param_count()));
      for (int k = 0; k < spec.param_count(); ++k) {
        const double fd = fd_ground_cost_grad(psi, spec, zs[0], Wrt::Theta, k, 1e-4, cost);
        REQUIRE_THAT(g.d[static_cast<std::size_t>(k)], WithinAbs(fd, 1e-6));
      }
    }
  }
}

TEST_CASE("latent gradients match finite differences", "[autodiff]") {
  Rng rng(32);
  const Rng unused(0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(2));
    const CircuitSpec spec = random_spec(n, rng);
    const Statevector psi = gen_hard_target_ensemble(n, 1, rng).states[0];
    auto zs = sample_latent_batch(spec.latent_dim(), 1, rng);
    const GroundCost cost = GroundCost::exact_local();
    const GradientResult g = ground_cost_grad(psi, spec, zs[0], Wrt::Z, cost, unused);
    REQUIRE(g.d.size() == static_cast<std::size_t>(spec.latent_dim()));
    // Truncation error grows with the cubed latent frequency (a feature can
    // drive many slots at once), so the step is smaller than the theta case.
    for (int m = 0; m < spec.latent_dim(); ++m) {
      const double fd = fd_ground_cost_grad(psi, spec, zs[0], Wrt::Z, m, 2e-5, cost);
      REQUIRE_THAT(g.d[static_cast<std::size_t>(m)], WithinAbs(fd, 1e-6));
    }
  }
}

TEST_CASE("transport loss gradient matches finite differences", "[autodiff]") {
  Rng rng(33);
  const Rng base = rng.stream(0);
  const int n = 2;
  const CircuitSpec spec = build_hea(n, 2, 1, Entangler::CZ, rng);
  const Ensemble ens = gen_localized_ensemble(n, 3, 0.4, 0.2, 0.0, 1.0, rng);
  auto zs = sample_latent_batch(1, 4, rng);
  const GroundCost cost = GroundCost::exact_local();
  const std::vector<double> q(zs.size(), 1.0 / static_cast<double>(zs.size()));

  const auto otl_loss = [&](const std::vector<double>& theta) {
    const CircuitSpec s = spec.with_theta(theta);
    const CostMatrix m = cost_matrix(ens, s, zs, cost, base);
    return solve_ot(m, ens.weights, q).loss;
  };

  const CostMatrix matrix = cost_matrix(ens, spec, zs, cost, base);
  const OtSolution sol = solve_ot(matrix, ens.weights, q);
  const GradientResult g = otl_theta_grad(ens, spec, zs, sol.plan, matrix, cost, base);

  // At a nondegenerate optimum the support is locally constant, so the fixed
  // plan gradient is the true derivative of the re-solved loss.
  const double h = 1e-5;
  for (int k = 0; k < spec.param_count(); ++k) {
    auto tp = spec.theta();
    tp[static_cast<std::size_t>(k)] += h;
    auto tm = spec.theta();
    tm[static_cast<std::size_t>(k)] -= h;
    const double fd = (otl_loss(tp) - otl_loss(tm)) / (2.0 * h);
    REQUIRE_THAT(g.d[static_cast<std::size_t>(k)], WithinAbs(fd, 1e-5));
  }
}

TEST_CASE("a one-cell plan reduces to the entry gradient", "[autodiff]") {
  Rng rng(34);
  const CircuitSpec spec = build_hea(2, 2, 1, Entangler::CX, rng);
  const Ensemble ens = gen_equator_ensemble(2, 1, rng);
  auto zs = sample_latent_batch(1, 1, rng);
  const Rng base = rng.stream(4);
  const CostMatrix m = cost_matrix(ens, spec, zs, GroundCost::exact_local(), base);
  TransportPlan plan;
  plan.rows = plan.cols = 1;
  plan.entries = {{0, 0, 1.0}};
  const GradientResult whole =
      otl_theta_grad(ens, spec, zs, plan, m, GroundCost::exact_local(), base);
  const GradientResult entry = ground_cost_grad(ens.states[0], spec, zs[0], Wrt::Theta,
                                                GroundCost::exact_local(), base.stream(0, 0),
                                                m.at(0, 0));
  REQUIRE(whole.d == entry.d);
  REQUIRE(whole.evals == entry.evals);
}

TEST_CASE("the loss against the model's own output has zero gradient", "[autodiff]") {
  Rng rng(35);
  const int n = 2;
  const CircuitSpec spec = build_hea(n, 3, 1, Entangler::CZ, rng);
  auto zs = sample_latent_batch(1, 3, rng);
  std::vector<Statevector> states;
  for (const auto& z : zs) states.push_back(run_circuit(spec, z));
  const Ensemble ens = Ensemble::uniform(std::move(states));
  const Rng base = rng.stream(1);
  const CostMatrix m = cost_matrix(ens, spec, zs, GroundCost::exact_local(), base);
  const OtSolution sol = solve_ot_uniform(m);
  REQUIRE(sol.loss <= 1e-9);
  const GradientResult g =
      otl_theta_grad(ens, spec, zs, sol.plan, m, GroundCost::exact_local(), base);
  for (double d : g.d) REQUIRE_THAT(d, WithinAbs(0.0, 1e-6));
}

TEST_CASE("evaluation counters follow the two-point rule", "[autodiff]") {
  Rng rng(36);
  const CircuitSpec spec = random_spec(3, rng);
  const Statevector psi = gen_hard_target_ensemble(3, 1, rng).states[0];
  auto zs = sample_latent_batch(spec.latent_dim(), 2, rng);
  const Rng base(7);

  const GradientResult gt =
      ground_cost_grad(psi, spec, zs[0], Wrt::Theta, GroundCost::exact_local(), base);
  REQUIRE(gt.evals == 2ll * spec.param_count());

  std::int64_t wired = 0;
  for (int e : spec.eta())
    if (e >= 1) ++wired;
  const GradientResult gz =
      ground_cost_grad(psi, spec, zs[0], Wrt::Z, GroundCost::exact_local(), base);
  REQUIRE(gz.evals == 2 * wired);

  // A zero forward cost short-circuits the arithmetic but still reports the
  // nominal budget of the rule.
  const GradientResult gzero =
      ground_cost_grad(psi, spec, zs[0], Wrt::Theta, GroundCost::exact_local(), base, 0.0);
  REQUIRE(gzero.evals == 2ll * spec.param_count());
  for (double d : gzero.d) REQUIRE(d == 0.0);

  const Ensemble ens = gen_equator_ensemble(3, 2, rng);
  const CostMatrix m = cost_matrix(ens, spec, zs, GroundCost::exact_local(), base);
  const OtSolution sol = solve_ot_uniform(m);
  const GradientResult go =
      otl_theta_grad(ens, spec, zs, sol.plan, m, GroundCost::exact_local(), base);
  REQUIRE(go.evals ==
          2ll * spec.param_count() * static_cast<std::int64_t>(sol.plan.entries.size()));
}

TEST_CASE("sampled gradients replay exactly from their stream", "[autodiff]") {
  Rng rng(37);
  const CircuitSpec spec = build_hea(2, 2, 1, Entangler::CZ, rng);
  const Statevector psi = gen_equator_ensemble(2, 1, rng).states[0];
  auto zs = sample_latent_batch(1, 1, rng);
  const Rng base = rng.stream(2);
  const GroundCost cost = GroundCost::sampled_local(256);
  const GradientResult a = ground_cost_grad(psi, spec, zs[0], Wrt::Theta, cost, base, 0.4);
  const GradientResult b = ground_cost_grad(psi, spec, zs[0], Wrt::Theta, cost, base, 0.4);
  REQUIRE(a.d == b.d);
}

TEST_CASE("sampled gradients concentrate on the exact ones", "[autodiff]") {
  Rng rng(38);
  const CircuitSpec spec = build_hea(2, 2, 1, Entangler::CZ, rng);
  const Statevector psi = gen_hard_target_ensemble(2, 1, rng).states[0];
  auto zs = sample_latent_batch(1, 1, rng);
  const Rng unused(0);
  const double exact_cost = local_cost_exact(psi, spec, zs[0]);
  const GradientResult exact =
      ground_cost_grad(psi, spec, zs[0], Wrt::Theta, GroundCost::exact_local(), unused, exact_cost);
  const GradientResult sampled = ground_cost_grad(psi, spec, zs[0], Wrt::Theta,
                                                  GroundCost::sampled_local(16384),
                                                  rng.stream(5), exact_cost);
  for (std::size_t k = 0; k < exact.d.size(); ++k)
    REQUIRE_THAT(sampled.d[k], WithinAbs(exact.d[k], 0.05));
}
