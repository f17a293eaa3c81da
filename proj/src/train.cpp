#include "qotl/train.hpp"

#include <cmath>
#include <limits>

namespace qotl {

namespace {
// Stream tags per iteration: latent batch, matrix entries, gradient entries.
enum : std::uint64_t { kTagBatch = 0, kTagMatrix = 1, kTagGrad = 2 };

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}
}  // namespace

TrainResult train(const Ensemble& ensemble, CircuitSpec spec, const TrainConfig& config) {
  const int m = ensemble.size();
  const int m_g = config.m_g > 0 ? config.m_g : m;
  const Rng root(config.seed);
  AdamState opt = AdamState::init(static_cast<std::size_t>(spec.param_count()));
  TrainTrace trace;
  trace.iters.reserve(static_cast<std::size_t>(config.iterations));

  for (int it = 0; it < config.iterations; ++it) {
    Rng batch_rng = root.stream(static_cast<std::uint64_t>(it), kTagBatch);
    const auto zs = sample_latent_batch(spec.latent_dim(), m_g, batch_rng);

    const Rng matrix_rng = root.stream(static_cast<std::uint64_t>(it), kTagMatrix);
    auto eval = evaluate_otl(ensemble, spec, zs, config.cost, matrix_rng);

    const Rng grad_rng = root.stream(static_cast<std::uint64_t>(it), kTagGrad);
    auto grad = otl_theta_grad(ensemble, spec, zs, eval.solution.plan, eval.matrix, config.cost,
                               grad_rng);

    TrainIterRecord rec;
    rec.iteration = it;
    rec.loss = eval.solution.loss;
    rec.global_loss = config.record_global ? eval_global_otl(ensemble, spec, zs)
                                           : std::numeric_limits<double>::quiet_NaN();
    double norm_sq = 0.0;
    for (double g : grad.d) norm_sq += g * g;
    rec.grad_norm = std::sqrt(norm_sq);
    rec.forward_evals = static_cast<std::int64_t>(m) * m_g;
    rec.forward_shots = rec.forward_evals * config.cost.shots;
    rec.grad_evals = grad.evals;
    rec.grad_shots = grad.evals * config.cost.shots;
    trace.iters.push_back(rec);

    if (!std::isfinite(rec.loss) || !all_finite(grad.d)) {
      trace.diverged = true;
      trace.diagnostic = "non-finite loss or gradient at iteration " + std::to_string(it);
      break;
    }

    auto theta = spec.theta();
    adam_step(theta, grad.d, opt, config.adam);
    if (!all_finite(theta)) {
      trace.diverged = true;
      trace.diagnostic = "non-finite parameters after update at iteration " + std::to_string(it);
      break;
    }
    spec = spec.with_theta(std::move(theta));
  }

  return {std::move(spec), std::move(opt), std::move(trace)};
}

double eval_global_otl(const Ensemble& ensemble, const CircuitSpec& spec,
                       const std::vector<LatentVector>& zs) {
  const Rng rng(0);
  return evaluate_otl(ensemble, spec, zs, GroundCost::exact_global(), rng).solution.loss;
}

}  // namespace qotl
