#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qotl/ansatz.hpp"
#include "qotl/cost.hpp"

namespace qotl {

/// Optimal plan support: lexicographically sorted cells with positive flow.
/// A basic solution has at most rows + cols - 1 of them.
struct TransportPlan {
  struct Entry {
    int i, j;
    double flow;
  };
  int rows = 0, cols = 0;
  std::vector<Entry> entries;
};

struct OtSolution {
  double loss = 0.0;
  TransportPlan plan;
  std::vector<double> u, v;  // optimal duals, u[0] anchored to 0
  std::int64_t pivots = 0;
};

/// Balanced discrete optimal transport via the transportation simplex.
/// Northwest-corner start; Dantzig pricing on a candidate list with a Bland
/// fallback after a run of degenerate pivots; reduced-cost tolerance 1e-12.
/// p and q must be nonnegative and sum to the same total within 1e-9.
OtSolution solve_ot(const CostMatrix& cost, std::span<const double> p, std::span<const double> q);

/// Uniform marginals 1/rows and 1/cols.
OtSolution solve_ot_uniform(const CostMatrix& cost);

struct OtlEvaluation {
  CostMatrix matrix;
  OtSolution solution;
};

/// Loss between the data ensemble and the model's latent batch: ground-cost
/// matrix with the ensemble weights against uniform latent weights, solved to
/// optimality.
OtlEvaluation evaluate_otl(const Ensemble& ensemble, const CircuitSpec& spec,
                           const std::vector<LatentVector>& zs, const GroundCost& cost,
                           const Rng& rng_base);

}  // namespace qotl
