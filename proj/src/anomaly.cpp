#include "qotl/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qotl/adam.hpp"
#include "qotl/parallel.hpp"

namespace qotl {

namespace {

enum : std::uint64_t { kTagInit = 0, kTagForward = 1, kTagGrad = 2, kTagEval = 3 };

double fixed_eval(const Statevector& test, const CircuitSpec& spec, const LatentVector& z,
                  const GroundCost& cost, const Rng& root) {
  Rng eval_rng = root.stream(kTagEval);
  return ground_cost(test, spec, z, cost, eval_rng);
}

void clamp_unit(std::vector<double>& z) {
  for (double& x : z) x = std::clamp(x, 0.0, 1.0);
}

}  // namespace

AnomalyResult anomaly_score(const Statevector& test, const CircuitSpec& spec,
                            const AnomalyConfig& config) {
  return anomaly_score(test, spec, config, Rng(config.seed));
}

AnomalyResult anomaly_score(const Statevector& test, const CircuitSpec& spec,
                            const AnomalyConfig& config, const Rng& root) {
  const int k = spec.latent_dim();
  AdamParams params;
  params.lr = config.step;

  AnomalyResult result;
  result.score = std::numeric_limits<double>::infinity();
  for (int r = 0; r < config.restarts; ++r) {
    LatentVector z;
    z.z.resize(static_cast<std::size_t>(k));
    if (config.init == AnomalyConfig::Init::Random) {
      Rng init_rng = root.stream(static_cast<std::uint64_t>(r), kTagInit);
      for (double& x : z.z) x = init_rng.uniform();
    } else {
      const double step = (static_cast<double>(r) + 0.5) / static_cast<double>(config.restarts);
      for (double& x : z.z) x = step;
    }

    double best = fixed_eval(test, spec, z, config.cost, root);
    LatentVector best_z = z;
    AdamState opt = AdamState::init(static_cast<std::size_t>(k));
    for (int it = 0; it < config.iterations; ++it) {
      Rng fwd_rng = root.stream(static_cast<std::uint64_t>(r), kTagForward,
                                static_cast<std::uint64_t>(it));
      const double c = ground_cost(test, spec, z, config.cost, fwd_rng);
      const Rng grad_rng = root.stream(static_cast<std::uint64_t>(r), kTagGrad,
                                       static_cast<std::uint64_t>(it));
      const auto grad = ground_cost_grad(test, spec, z, Wrt::Z, config.cost, grad_rng, c);
      adam_step(z.z, grad.d, opt, params);
      clamp_unit(z.z);
      const double score = fixed_eval(test, spec, z, config.cost, root);
      if (score < best) {
        best = score;
        best_z = z;
      }
    }
    result.restart_scores.push_back(best);
    if (best < result.score) {
      result.score = best;
      result.argmin = best_z;
    }
  }
  return result;
}

std::vector<ScoreRow> score_grid(const std::vector<TestPoint>& points, const CircuitSpec& spec,
                                 const AnomalyConfig& config) {
  std::vector<ScoreRow> rows(points.size());
  const Rng root(config.seed);
  par::for_each_index(static_cast<std::ptrdiff_t>(points.size()), [&](std::ptrdiff_t idx) {
    const auto& pt = points[static_cast<std::size_t>(idx)];
    const auto res =
        anomaly_score(pt.state, spec, config, root.stream(static_cast<std::uint64_t>(idx)));
    rows[static_cast<std::size_t>(idx)] = {pt.theta_t, pt.phi_t, res.score, res.argmin,
                                           config.restarts};
  });
  return rows;
}

double theoretical_as_equator(double theta_t, int n) {
  const CircuitSpec model = equator_model_spec(n);
  const Statevector test = test_state(n, theta_t, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 400; ++i) {
    LatentVector z;
    z.z = {static_cast<double>(i) / 400.0};
    best = std::min(best, local_cost_exact(test, model, z));
  }
  return best;
}

}  // namespace qotl
