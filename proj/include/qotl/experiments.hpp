#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qotl/ansatz.hpp"
#include "qotl/fit.hpp"

namespace qotl {

/// Loss between two fresh latent batches pushed through the same circuit:
/// the data side holds the states of batch one, the model side batch two.
/// Decays toward zero as the batch grows since both sides share one family.
struct ScalingAConfig {
  std::vector<int> ns{2, 4};
  std::vector<int> nzs{1, 2};
  std::vector<int> ms{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  int n_monte = 20;
  std::uint64_t seed = 1;
};

struct ScalingARow {
  int n, n_z, m, trial;
  double j;
};

struct ScalingAAgg {
  int n, n_z, m, n_monte;
  double mean_j, stderr_j;
};

struct ScalingAResult {
  std::vector<ScalingARow> raw;
  std::vector<ScalingAAgg> agg;
};

ScalingAResult run_scaling_a(const ScalingAConfig& config);

/// Same loss between two distinct families (axes and wires redrawn until
/// they differ); the mean loss approaches a positive floor and the approach
/// rate is summarized by the power-law fit per cell.
struct ScalingBConfig {
  std::vector<int> ns{1, 2, 4};
  std::vector<int> nzs{1, 2, 4};
  std::vector<int> ms{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  int n_monte = 20;
  std::uint64_t seed = 1;
};

struct ScalingBFitRow {
  int n, n_z;
  double a, b, c, sse;
  bool flagged;
  /// Mean loss at the largest batch, the stand-in for the infinite-data value.
  double j_floor;
};

struct ScalingBResult {
  std::vector<ScalingARow> raw;
  std::vector<ScalingAAgg> agg;
  std::vector<ScalingBFitRow> fits;
};

ScalingBResult run_scaling_b(const ScalingBConfig& config);

/// |sampled loss - exact loss| on shared batches, swept over shot budget and
/// batch size.
struct ShotErrorConfig {
  int n = 4;
  std::vector<int> nzs{1};
  std::vector<int> ms{1, 2, 4, 8, 16, 32, 64};
  std::vector<int> shot_counts{128, 256, 512, 1024, 2048};
  int n_monte = 16;
  std::uint64_t seed = 1;
};

struct ShotErrorRow {
  int n, n_z, m, shots, trial;
  double abs_err;
};

struct ShotErrorAgg {
  int n, n_z, m, shots, n_monte;
  double mean_abs_err, stderr_abs_err;
};

struct ShotErrorResult {
  std::vector<ShotErrorRow> raw;
  std::vector<ShotErrorAgg> agg;
};

ShotErrorResult run_shot_error(const ShotErrorConfig& config);

/// Variance of the first slot's loss derivative over fresh circuit draws and
/// batches, against a fixed hard-to-match target ensemble; one arm per ground
/// cost so the flat local scaling can be contrasted with the global decay.
struct GradVarConfig {
  std::vector<int> ns{2, 4, 6};
  std::vector<int> nls{10, 25};
  std::vector<int> ms{2, 4, 8, 16};
  int n_monte = 50;
  std::uint64_t seed = 1;
};

struct GradVarRow {
  std::string cost;  // "global" or "local"
  int n, n_l, m, trial;
  double grad;
};

struct GradVarAgg {
  std::string cost;
  int n, n_l, m, n_monte;
  double variance;
};

struct GradVarResult {
  std::vector<GradVarRow> raw;
  std::vector<GradVarAgg> agg;
};

GradVarResult run_grad_var(const GradVarConfig& config);

}  // namespace qotl
