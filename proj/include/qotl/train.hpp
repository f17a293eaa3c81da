#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qotl/adam.hpp"
#include "qotl/autodiff.hpp"
#include "qotl/transport.hpp"

namespace qotl {

struct TrainConfig {
  int iterations = 100;
  int m_g = 0;  // latent batch size; 0 means match the ensemble size
  GroundCost cost = GroundCost::exact_local();
  AdamParams adam{};
  std::uint64_t seed = 1;
  /// Also evaluate the exact trace-distance loss on each iteration's batch.
  bool record_global = false;
};

struct TrainIterRecord {
  int iteration;
  double loss;
  double global_loss;  // NaN unless record_global
  double grad_norm;
  std::int64_t forward_evals, forward_shots, grad_evals, grad_shots;
};

struct TrainTrace {
  std::vector<TrainIterRecord> iters;
  bool diverged = false;
  std::string diagnostic;
};

struct TrainResult {
  CircuitSpec spec;
  AdamState opt;
  TrainTrace trace;
};

/// Iterates: latent batch -> ground-cost matrix -> optimal plan -> fixed-plan
/// gradient -> Adam update. Sampling streams are derived per iteration from
/// the seed, with separate children for the batch, the matrix, and the
/// gradient, so matrix shots are never reused by gradient shifts.
/// Non-finite loss or gradient stops the loop and marks the trace diverged.
TrainResult train(const Ensemble& ensemble, CircuitSpec spec, const TrainConfig& config);

/// Exact trace-distance transport loss of the model against the ensemble on
/// a given latent batch.
double eval_global_otl(const Ensemble& ensemble, const CircuitSpec& spec,
                       const std::vector<LatentVector>& zs);

}  // namespace qotl
