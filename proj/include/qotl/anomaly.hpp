#pragma once

#include <cstdint>
#include <vector>

#include "qotl/autodiff.hpp"
#include "qotl/cost.hpp"

namespace qotl {

struct AnomalyConfig {
  GroundCost cost = GroundCost::exact_local();
  int iterations = 200;
  double step = 0.05;
  int restarts = 4;
  /// Random: z0 ~ U(0,1)^k per restart; Grid: restarts spread evenly on the
  /// latent cube diagonal.
  enum class Init { Random, Grid } init = Init::Random;
  std::uint64_t seed = 1;
};

struct AnomalyResult {
  double score = 0.0;
  LatentVector argmin;
  std::vector<double> restart_scores;  // best score per restart
};

/// min_z ground_cost(test, model(z)) by Adam descent on z with restarts and
/// clamping to [0,1]. Candidates are compared on re-evaluations under one
/// fixed evaluation stream, so shot noise cannot leak between the descent
/// trajectory and the reported best.
AnomalyResult anomaly_score(const Statevector& test, const CircuitSpec& spec,
                            const AnomalyConfig& config);
AnomalyResult anomaly_score(const Statevector& test, const CircuitSpec& spec,
                            const AnomalyConfig& config, const Rng& root);

struct ScoreRow {
  double theta_t, phi_t;
  double score;
  LatentVector argmin;
  int restarts;
};

/// Scores every test point; per-point streams derive from the config seed.
std::vector<ScoreRow> score_grid(const std::vector<TestPoint>& points, const CircuitSpec& spec,
                                 const AnomalyConfig& config);

/// Exact minimum of the local cost between the (theta_t, phi_t = 0) test
/// state and the closed-form equator model, over a 400-point latent grid.
double theoretical_as_equator(double theta_t, int n);

}  // namespace qotl
