#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "qotl/ansatz.hpp"
#include "qotl/qsim.hpp"
#include "qotl/rng.hpp"
#include "qotl/statevector.hpp"

using namespace qotl;
using Catch::Matchers::WithinAbs;

TEST_CASE("latent feature zero is the constant bias", "[ansatz]") {
  LatentVector z;
  z.z = {0.25, 0.75};
  REQUIRE(z.feature(0) == 1.0);
  REQUIRE(z.feature(1) == 0.25);
  REQUIRE(z.feature(2) == 0.75);
  REQUIRE(z.dim() == 2);
}

TEST_CASE("latent batches live in the unit cube", "[ansatz]") {
  Rng rng(4);
  const auto batch = sample_latent_batch(3, 50, rng);
  REQUIRE(batch.size() == 50);
  for (const auto& z : batch) {
    REQUIRE(z.dim() == 3);
    for (double x : z.z) {
      REQUIRE(x >= 0.0);
      REQUIRE(x < 1.0);
    }
  }
}

TEST_CASE("full-width ladder pairs", "[ansatz]") {
  Rng rng(1);
  const CircuitSpec spec = build_hea(4, 2, 1, Entangler::CZ, rng);
  const std::vector<std::pair<int, int>> want{{0, 1}, {1, 2}, {2, 3}};
  REQUIRE(spec.entangler_pairs(0) == want);
  REQUIRE(spec.entangler_pairs(1) == want);
}

TEST_CASE("alternating blocks shift by half a block on odd layers", "[ansatz]") {
  Rng rng(1);
  const CircuitSpec spec = build_ala(6, 3, 1, 2, Entangler::CZ, rng);
  const std::vector<std::pair<int, int>> even{{0, 1}, {2, 3}, {4, 5}};
  const std::vector<std::pair<int, int>> odd{{1, 2}, {3, 4}};
  REQUIRE(spec.entangler_pairs(0) == even);
  REQUIRE(spec.entangler_pairs(1) == odd);
  REQUIRE(spec.entangler_pairs(2) == even);
}

TEST_CASE("four-wide blocks on eight qubits", "[ansatz]") {
  Rng rng(1);
  const CircuitSpec spec = build_ala(8, 2, 1, 4, Entangler::CZ, rng);
  const std::vector<std::pair<int, int>> even{{0, 1}, {1, 2}, {2, 3}, {4, 5}, {5, 6}, {6, 7}};
  const std::vector<std::pair<int, int>> odd{{0, 1}, {2, 3}, {3, 4}, {4, 5}, {6, 7}};
  REQUIRE(spec.entangler_pairs(0) == even);
  REQUIRE(spec.entangler_pairs(1) == odd);
}

TEST_CASE("blocks as wide as the register reduce to the full ladder", "[ansatz]") {
  Rng rng(1);
  const CircuitSpec spec = build_ala(4, 2, 1, 4, Entangler::CZ, rng);
  const std::vector<std::pair<int, int>> want{{0, 1}, {1, 2}, {2, 3}};
  REQUIRE(spec.entangler_pairs(0) == want);
  REQUIRE(spec.entangler_pairs(1) == want);
}

TEST_CASE("default depth grows with the latent dimension", "[ansatz]") {
  REQUIRE(default_layers(2, 1) == 3);
  REQUIRE(default_layers(2, 2) == 4);
  REQUIRE(default_layers(4, 6) == 4);
  REQUIRE(default_layers(8, 6) == 3);
}

TEST_CASE("builder draws axes then wires then angles", "[ansatz]") {
  Rng rng(5);
  const CircuitSpec spec = build_hea(3, 2, 2, Entangler::CZ, rng);
  Rng replay(5);
  for (int s = 0; s < 6; ++s)
    REQUIRE(static_cast<int>(spec.xi()[static_cast<std::size_t>(s)]) ==
            static_cast<int>(replay.below(3)));
  for (int s = 0; s < 6; ++s)
    REQUIRE(spec.eta()[static_cast<std::size_t>(s)] == static_cast<int>(replay.below(3)));
  for (int s = 0; s < 6; ++s)
    REQUIRE(spec.theta()[static_cast<std::size_t>(s)] ==
            replay.uniform(0.0, 2.0 * std::numbers::pi));
}

TEST_CASE("slot angles scale with the wired feature", "[ansatz]") {
  Rng rng(6);
  const CircuitSpec spec = build_hea(2, 2, 2, Entangler::CZ, rng);
  LatentVector z;
  z.z = {0.3, 0.9};
  for (int s = 0; s < spec.param_count(); ++s) {
    const double theta = spec.theta()[static_cast<std::size_t>(s)];
    const int wire = spec.eta()[static_cast<std::size_t>(s)];
    REQUIRE(spec.slot_angle(s, z) == theta * z.feature(wire));
  }
}

TEST_CASE("theta redraw keeps the wiring", "[ansatz]") {
  Rng rng(7);
  const CircuitSpec spec = build_hea(3, 2, 1, Entangler::CX, rng);
  const CircuitSpec redrawn = redraw_theta(spec, rng);
  REQUIRE(redrawn.xi() == spec.xi());
  REQUIRE(redrawn.eta() == spec.eta());
  REQUIRE(redrawn.theta() != spec.theta());
}

TEST_CASE("centered redraw is zero-mean and unit-scale", "[ansatz]") {
  Rng rng(8);
  const CircuitSpec spec = build_hea(10, 50, 1, Entangler::CZ, rng);
  const CircuitSpec centered = redraw_theta_centered(spec, rng);
  REQUIRE(centered.xi() == spec.xi());
  REQUIRE(centered.eta() == spec.eta());
  double mean = 0.0, var = 0.0;
  for (double t : centered.theta()) mean += t;
  mean /= static_cast<double>(centered.theta().size());
  for (double t : centered.theta()) var += (t - mean) * (t - mean);
  var /= static_cast<double>(centered.theta().size());
  REQUIRE(std::abs(mean) < 0.15);
  REQUIRE(std::abs(var - 1.0) < 0.25);
}

TEST_CASE("test states occupy the two pole amplitudes", "[ansatz]") {
  const Statevector sv = test_state(3, 0.4, 0.2);
  const double half = 0.5 * std::numbers::pi * 0.4;
  REQUIRE_THAT(sv.amp(0).real(), WithinAbs(std::cos(half), 1e-15));
  REQUIRE_THAT(std::abs(sv.amp(7)), WithinAbs(std::sin(half), 1e-15));
  REQUIRE_THAT(std::arg(sv.amp(7)), WithinAbs(2.0 * std::numbers::pi * 0.2, 1e-14));
  for (std::size_t x = 1; x < 7; ++x) REQUIRE(std::norm(sv.amp(x)) == 0.0);
}

TEST_CASE("equator states sit at the balanced polar angle", "[ansatz]") {
  const Statevector sv = equator_state(2, 0.6);
  const Statevector direct = test_state(2, 0.5, 0.6);
  REQUIRE_THAT(fidelity(sv, direct), WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(std::norm(sv.amp(0)), WithinAbs(0.5, 1e-14));
}

TEST_CASE("ensembles are uniformly weighted and sized", "[ansatz]") {
  Rng rng(8);
  const Ensemble eq = gen_equator_ensemble(2, 7, rng);
  REQUIRE(eq.size() == 7);
  for (double w : eq.weights) REQUIRE_THAT(w, WithinAbs(1.0 / 7.0, 1e-15));
  const Ensemble loc = gen_localized_ensemble(2, 5, 0.5, 0.01, 0.0, 0.1, rng);
  REQUIRE(loc.size() == 5);
  const Ensemble hard = gen_hard_target_ensemble(3, 4, rng);
  REQUIRE(hard.size() == 4);
  for (const auto& s : hard.states) REQUIRE_THAT(s.norm_sq(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("localized states cluster near their polar mean", "[ansatz]") {
  Rng rng(9);
  const Ensemble loc = gen_localized_ensemble(2, 64, 0.5, 0.01, 0.0, 1.0, rng);
  for (const auto& s : loc.states) {
    // dtheta ~ N(0.5, 0.01) keeps |a0|^2 = cos^2(pi dtheta / 2) near 1/2.
    REQUIRE_THAT(std::norm(s.amp(0)), WithinAbs(0.5, 0.1));
  }
}

TEST_CASE("hard targets differ across the ensemble", "[ansatz]") {
  Rng rng(10);
  const Ensemble hard = gen_hard_target_ensemble(3, 3, rng);
  REQUIRE(fidelity(hard.states[0], hard.states[1]) < 0.999);
  REQUIRE(fidelity(hard.states[1], hard.states[2]) < 0.999);
}

TEST_CASE("test grid is the outer product of both axes", "[ansatz]") {
  const auto grid = gen_test_grid(2, {0.0, 0.5, 1.0}, {0.0, 0.25});
  REQUIRE(grid.size() == 6);
  REQUIRE(grid[0].theta_t == 0.0);
  REQUIRE(grid[0].phi_t == 0.0);
  REQUIRE(grid[1].phi_t == 0.25);
  REQUIRE(grid[5].theta_t == 1.0);
}

TEST_CASE("bloch projection of the poles and the equator", "[ansatz]") {
  const BlochVector top = bloch_projection(Statevector::zero_state(3));
  REQUIRE_THAT(top.x, WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(top.y, WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(top.z, WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(top.residual, WithinAbs(0.0, 1e-15));

  const BlochVector eq = bloch_projection(equator_state(2, 0.25));
  REQUIRE_THAT(eq.x, WithinAbs(0.0, 1e-14));
  REQUIRE_THAT(eq.y, WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(eq.z, WithinAbs(0.0, 1e-14));
  REQUIRE_THAT(eq.x * eq.x + eq.y * eq.y, WithinAbs(1.0, 1e-13));
}

TEST_CASE("bloch residual counts the mass outside the pole span", "[ansatz]") {
  std::vector<cplx> amps(4, cplx{0.0, 0.0});
  amps[0] = cplx{std::sqrt(0.5), 0.0};
  amps[1] = cplx{std::sqrt(0.3), 0.0};
  amps[3] = cplx{std::sqrt(0.2), 0.0};
  const BlochVector b = bloch_projection(Statevector::from_amplitudes(2, std::move(amps)));
  REQUIRE_THAT(b.residual, WithinAbs(0.3, 1e-14));
}

TEST_CASE("closed-form model reproduces the equator family", "[ansatz]") {
  for (int n = 1; n <= 5; ++n) {
    const CircuitSpec model = equator_model_spec(n);
    REQUIRE(model.latent_dim() == 1);
    for (int i = 0; i <= 10; ++i) {
      const double zv = static_cast<double>(i) / 10.0;
      LatentVector z;
      z.z = {zv};
      const Statevector out = run_circuit(model, z);
      REQUIRE_THAT(fidelity(out, equator_state(n, zv)), WithinAbs(1.0, 1e-12));
    }
  }
}

TEST_CASE("closed-form model sweeps the phase linearly", "[ansatz]") {
  const CircuitSpec model = equator_model_spec(3);
  LatentVector z;
  z.z = {0.37};
  const Statevector out = run_circuit(model, z);
  const cplx rel = out.amp(7) / out.amp(0);
  REQUIRE_THAT(std::arg(rel) < 0.0 ? std::arg(rel) + 2.0 * std::numbers::pi : std::arg(rel),
               WithinAbs(2.0 * std::numbers::pi * 0.37, 1e-12));
}
