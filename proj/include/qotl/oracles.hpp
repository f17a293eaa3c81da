#pragma once

#include <span>

#include "qotl/cost.hpp"

namespace qotl::oracle {

/// Minimum of (1/M) sum_i c[i][sigma(i)] over all permutations sigma.
/// Ground truth for uniform square transport; rows == cols <= 8.
double permutation_minimum(const CostMatrix& cost);

/// Minimum cost over every feasible basic solution: each spanning tree of the
/// bipartite row/column graph determines flows by leaf elimination, and trees
/// with nonnegative flows are candidate optima. Exhaustive; sized for small
/// instances only.
double basic_solution_minimum(const CostMatrix& cost, std::span<const double> p,
                              std::span<const double> q);

}  // namespace qotl::oracle
