#include "qotl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qotl::oracle {

double permutation_minimum(const CostMatrix& cost) {
  if (cost.rows != cost.cols) {
    throw std::invalid_argument("permutation oracle needs a square matrix");
  }
  if (cost.rows > 8) {
    throw std::invalid_argument("permutation oracle limited to 8x8");
  }
  std::vector<int> perm(cost.rows);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < cost.rows; ++i) total += cost.at(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(cost.rows);
}

namespace {

// Tree edges index into the flattened cost matrix; nodes 0..R-1 are rows and
// R..R+C-1 are columns.
struct Basis {
  std::vector<int> edges;
};

bool spanning_tree(const std::vector<int>& edges, int rows, int cols) {
  const int nodes = rows + cols;
  std::vector<int> parent(nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int merged = 0;
  for (int e : edges) {
    const int a = e / cols;
    const int b = rows + e % cols;
    const int ra = find(a);
    const int rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
    ++merged;
  }
  return merged == nodes - 1;
}

// Leaf elimination: a degree-one node forces the flow on its only edge.
// Returns false when any forced flow is meaningfully negative.
bool tree_flows(const std::vector<int>& edges, int rows, int cols,
                std::span<const double> p, std::span<const double> q,
                std::vector<double>& flow) {
  const int nodes = rows + cols;
  std::vector<double> residual(nodes);
  for (int i = 0; i < rows; ++i) residual[i] = p[i];
  for (int j = 0; j < cols; ++j) residual[rows + j] = q[j];
  std::vector<int> degree(nodes, 0);
  std::vector<bool> used(edges.size(), false);
  for (int e : edges) {
    ++degree[e / cols];
    ++degree[rows + e % cols];
  }
  flow.assign(edges.size(), 0.0);
  for (std::size_t round = 0; round + 1 < edges.size() + 1; ++round) {
    int leaf = -1;
    for (int v = 0; v < nodes; ++v) {
      if (degree[v] == 1) {
        leaf = v;
        break;
      }
    }
    if (leaf < 0) break;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (used[k]) continue;
      const int a = edges[k] / cols;
      const int b = rows + edges[k] % cols;
      if (a != leaf && b != leaf) continue;
      const double f = residual[leaf];
      if (f < -1e-12) return false;
      flow[k] = f;
      const int other = (a == leaf) ? b : a;
      residual[other] -= f;
      residual[leaf] = 0.0;
      used[k] = true;
      --degree[a];
      --degree[b];
      break;
    }
  }
  return true;
}

}  // namespace

double basic_solution_minimum(const CostMatrix& cost, std::span<const double> p,
                              std::span<const double> q) {
  const int rows = cost.rows;
  const int cols = cost.cols;
  if (static_cast<int>(p.size()) != rows || static_cast<int>(q.size()) != cols) {
    throw std::invalid_argument("marginal sizes do not match the cost matrix");
  }
  const int total_edges = rows * cols;
  const int basis_size = rows + cols - 1;
  if (total_edges > 20) {
    throw std::invalid_argument("basic-solution oracle sized for tiny instances");
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(basis_size);
  std::vector<double> flow;
  // Enumerate every subset of basis_size edges via the lexicographic
  // combination walk.
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    if (spanning_tree(pick, rows, cols) &&
        tree_flows(pick, rows, cols, p, q, flow)) {
      double total = 0.0;
      for (int k = 0; k < basis_size; ++k) {
        total += std::max(flow[k], 0.0) * cost.v[pick[k]];
      }
      best = std::min(best, total);
    }
    int i = basis_size - 1;
    while (i >= 0 && pick[i] == total_edges - basis_size + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < basis_size; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace qotl::oracle
