#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qotl/rng.hpp"
#include "qotl/train.hpp"

using namespace qotl;

namespace {

Ensemble equator_targets(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  return gen_equator_ensemble(n, m, rng);
}

CircuitSpec starting_model(int n, int layers, std::uint64_t seed) {
  Rng rng(seed);
  return build_hea(n, layers, 1, Entangler::CZ, rng);
}

}  // namespace

TEST_CASE("iteration records account for every evaluation", "[train]") {
  const Ensemble ens = equator_targets(2, 3, 41);
  const CircuitSpec spec = starting_model(2, 2, 42);
  TrainConfig cfg;
  cfg.iterations = 3;
  cfg.m_g = 2;
  cfg.cost = GroundCost::sampled_local(64);
  cfg.seed = 5;
  const TrainResult res = train(ens, spec, cfg);
  REQUIRE(res.trace.iters.size() == 3);
  const std::int64_t per_entry = 2ll * spec.param_count();
  for (const auto& rec : res.trace.iters) {
    REQUIRE(rec.forward_evals == 3 * 2);
    REQUIRE(rec.forward_shots == rec.forward_evals * 64);
    REQUIRE(rec.grad_evals % per_entry == 0);
    REQUIRE(rec.grad_evals >= per_entry);
    REQUIRE(rec.grad_evals <= per_entry * (3 + 2 - 1));
    REQUIRE(rec.grad_shots == rec.grad_evals * 64);
    REQUIRE(std::isnan(rec.global_loss));
  }

  // Exact evaluation consumes no shots, and an omitted batch size matches the
  // ensemble.
  cfg.cost = GroundCost::exact_local();
  cfg.m_g = 0;
  const TrainResult exact = train(ens, spec, cfg);
  for (const auto& rec : exact.trace.iters) {
    REQUIRE(rec.forward_evals == 3 * 3);
    REQUIRE(rec.forward_shots == 0);
    REQUIRE(rec.grad_shots == 0);
  }
}

TEST_CASE("zero iterations leave the model untouched", "[train]") {
  const Ensemble ens = equator_targets(2, 2, 43);
  const CircuitSpec spec = starting_model(2, 2, 44);
  TrainConfig cfg;
  cfg.iterations = 0;
  const TrainResult res = train(ens, spec, cfg);
  REQUIRE(res.trace.iters.empty());
  REQUIRE_FALSE(res.trace.diverged);
  REQUIRE(res.spec.theta() == spec.theta());
  REQUIRE(res.opt.t == 0);
}

TEST_CASE("training replays bit for bit from its seed", "[train]") {
  const Ensemble ens = equator_targets(2, 3, 45);
  const CircuitSpec spec = starting_model(2, 3, 46);
  TrainConfig cfg;
  cfg.iterations = 8;
  cfg.cost = GroundCost::sampled_local(128);
  cfg.seed = 11;
  const TrainResult a = train(ens, spec, cfg);
  const TrainResult b = train(ens, spec, cfg);
  REQUIRE(a.spec.theta() == b.spec.theta());
  REQUIRE(a.trace.iters.size() == b.trace.iters.size());
  for (std::size_t k = 0; k < a.trace.iters.size(); ++k) {
    REQUIRE(a.trace.iters[k].loss == b.trace.iters[k].loss);
    REQUIRE(a.trace.iters[k].grad_norm == b.trace.iters[k].grad_norm);
  }
  cfg.seed = 12;
  const TrainResult c = train(ens, spec, cfg);
  REQUIRE(a.spec.theta() != c.spec.theta());
}

TEST_CASE("a single-state ensemble is learned to low loss", "[train]") {
  const int n = 2;
  Rng rng(47);
  const CircuitSpec init = build_hea(n, 10, 1, Entangler::CZ, rng);
  const CircuitSpec sibling = redraw_theta(init, rng);
  LatentVector z{{0.3}};
  const Ensemble ens = Ensemble::uniform({run_circuit(sibling, z)});
  TrainConfig cfg;
  cfg.iterations = 500;
  cfg.adam.lr = 0.02;
  cfg.seed = 2;
  const TrainResult res = train(ens, init, cfg);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& rec : res.trace.iters) best = std::min(best, rec.loss);
  REQUIRE(best < 0.05);
}

TEST_CASE("the loss trends downward over training", "[train]") {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Ensemble ens = equator_targets(2, 4, 100 + seed);
    const CircuitSpec spec = starting_model(2, 3, 200 + seed);
    TrainConfig cfg;
    cfg.iterations = 60;
    cfg.adam.lr = 0.05;
    cfg.seed = seed;
    const TrainResult res = train(ens, spec, cfg);
    const auto& it = res.trace.iters;
    const std::size_t quarter = it.size() / 4;
    double head = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < quarter; ++k) {
      head += it[k].loss;
      tail += it[it.size() - 1 - k].loss;
    }
    if (tail < head) ++improved;
  }
  REQUIRE(improved >= 5);
}

TEST_CASE("the recorded global loss dominates the local one", "[train]") {
  const Ensemble ens = equator_targets(2, 3, 48);
  const CircuitSpec spec = starting_model(2, 2, 49);
  TrainConfig cfg;
  cfg.iterations = 5;
  cfg.record_global = true;
  const TrainResult res = train(ens, spec, cfg);
  for (const auto& rec : res.trace.iters) {
    REQUIRE(std::isfinite(rec.global_loss));
    REQUIRE(rec.global_loss >= rec.loss - 1e-12);
  }
}

TEST_CASE("a non-finite update stops training with a diagnostic", "[train]") {
  const Ensemble ens = equator_targets(2, 2, 50);
  const CircuitSpec spec = starting_model(2, 2, 51);
  TrainConfig cfg;
  cfg.iterations = 10;
  cfg.adam.lr = std::numeric_limits<double>::quiet_NaN();
  const TrainResult res = train(ens, spec, cfg);
  REQUIRE(res.trace.diverged);
  REQUIRE(res.trace.iters.size() == 1);
  REQUIRE(std::isfinite(res.trace.iters[0].loss));
  REQUIRE(res.trace.diagnostic.find("after update") != std::string::npos);
}
