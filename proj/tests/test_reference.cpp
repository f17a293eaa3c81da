#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qotl/ansatz.hpp"
#include "qotl/parallel.hpp"
#include "qotl/qsim.hpp"
#include "qotl/reference.hpp"
#include "qotl/rng.hpp"

using namespace qotl;
using Catch::Matchers::WithinAbs;

namespace {

CircuitSpec random_spec(std::uint64_t seed, Rng& rng) {
  if (seed % 2 == 0) return build_hea(5, 3, 2, seed % 4 == 0 ? Entangler::CZ : Entangler::CX, rng);
  return build_ala(5, 3, 2, 2, seed % 3 == 0 ? Entangler::CZ : Entangler::CX, rng);
}

}  // namespace

TEST_CASE("parallel circuit matches the serial reference", "[reference]") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(seed);
    const CircuitSpec spec = random_spec(seed, rng);
    auto zs = sample_latent_batch(2, 1, rng);
    const Statevector fast = run_circuit(spec, zs[0]);
    const Statevector slow = ref::run_circuit(spec, zs[0]);
    for (std::size_t x = 0; x < fast.dim(); ++x)
      REQUIRE_THAT(std::abs(fast.amp(x) - slow.amp(x)), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("parallel circuit matches the reference under angle shifts", "[reference]") {
  Rng rng(12);
  const CircuitSpec spec = build_hea(4, 3, 1, Entangler::CZ, rng);
  auto zs = sample_latent_batch(1, 1, rng);
  const AngleShift shift{5, 0.785};
  const Statevector fast = run_circuit(spec, zs[0], shift);
  const Statevector slow = ref::run_circuit(spec, zs[0], shift);
  for (std::size_t x = 0; x < fast.dim(); ++x)
    REQUIRE_THAT(std::abs(fast.amp(x) - slow.amp(x)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("probabilities and marginals match the reference", "[reference]") {
  Rng rng(5);
  const CircuitSpec spec = build_hea(6, 3, 2, Entangler::CX, rng);
  auto zs = sample_latent_batch(2, 1, rng);
  const Statevector sv = run_circuit(spec, zs[0]);
  const auto fast = basis_probabilities(sv);
  const auto slow = ref::basis_probabilities(sv);
  REQUIRE(fast.size() == slow.size());
  for (std::size_t x = 0; x < fast.size(); ++x)
    REQUIRE_THAT(fast[x], WithinAbs(slow[x], 1e-14));
  for (int k = 0; k < 6; ++k)
    REQUIRE_THAT(marginal_zero_prob(fast, 6, k), WithinAbs(ref::marginal_zero_prob(slow, 6, k), 1e-13));
}

TEST_CASE("results are bitwise invariant to the worker count", "[reference]") {
  Rng rng(7);
  const CircuitSpec spec = build_hea(6, 4, 2, Entangler::CZ, rng);
  auto zs = sample_latent_batch(2, 1, rng);
  const int saved = par::max_threads();
  par::set_max_threads(1);
  const Statevector one = run_circuit(spec, zs[0]);
  par::set_max_threads(4);
  const Statevector four = run_circuit(spec, zs[0]);
  par::set_max_threads(saved);
  for (std::size_t x = 0; x < one.dim(); ++x) REQUIRE(one.amp(x) == four.amp(x));
  REQUIRE(one.norm_sq() == four.norm_sq());
}
