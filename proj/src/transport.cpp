#include "qotl/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qotl {

namespace {

constexpr double kReducedCostTol = 1e-12;
constexpr double kDegenerateFlow = 1e-15;
constexpr int kCandidateCap = 64;
constexpr int kBlandTrigger = 64;

struct BasisEdge {
  int i, j;
  double flow;
};

/// Spanning-tree basis over rows 0..R-1 and columns R..R+C-1.
class Simplex {
 public:
  Simplex(const CostMatrix& cost, std::span<const double> p, std::span<const double> q)
      : c_(cost), R_(cost.rows), C_(cost.cols), adj_(static_cast<std::size_t>(R_ + C_)) {
    northwest_start(p, q);
  }

  void solve();

  OtSolution extract() const;

 private:
  double cost_at(int i, int j) const { return c_.at(i, j); }
  int col_node(int j) const { return R_ + j; }

  void northwest_start(std::span<const double> p, std::span<const double> q);
  void attach(int e);
  void detach(int e);
  void recompute_duals();
  double reduced_cost(int i, int j) const { return cost_at(i, j) - u_[static_cast<std::size_t>(i)] - v_[static_cast<std::size_t>(j)]; }
  bool refill_candidates();
  int pick_entering();
  int pick_entering_bland() const;
  void pivot(int i, int j);

  const CostMatrix& c_;
  int R_, C_;
  std::vector<BasisEdge> edges_;
  std::vector<std::vector<int>> adj_;  // node -> basis edge indices
  std::vector<double> u_, v_;
  std::vector<std::pair<int, int>> candidates_;
  std::int64_t pivots_ = 0;
  int degenerate_run_ = 0;
};

void Simplex::attach(int e) {
  adj_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(e)].i)].push_back(e);
  adj_[static_cast<std::size_t>(col_node(edges_[static_cast<std::size_t>(e)].j))].push_back(e);
}

void Simplex::detach(int e) {
  auto drop = [&](int node) {
    auto& list = adj_[static_cast<std::size_t>(node)];
    list.erase(std::find(list.begin(), list.end(), e));
  };
  drop(edges_[static_cast<std::size_t>(e)].i);
  drop(col_node(edges_[static_cast<std::size_t>(e)].j));
}

void Simplex::northwest_start(std::span<const double> p, std::span<const double> q) {
  std::vector<double> pr(p.begin(), p.end());
  std::vector<double> qr(q.begin(), q.end());
  int i = 0, j = 0;
  const int steps = R_ + C_ - 1;
  edges_.reserve(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    const double t = std::min(pr[static_cast<std::size_t>(i)], qr[static_cast<std::size_t>(j)]);
    edges_.push_back({i, j, t});
    attach(static_cast<int>(edges_.size()) - 1);
    pr[static_cast<std::size_t>(i)] -= t;
    qr[static_cast<std::size_t>(j)] -= t;
    if (i == R_ - 1) {
      ++j;
    } else if (j == C_ - 1) {
      ++i;
    } else if (pr[static_cast<std::size_t>(i)] == 0.0) {
      ++i;
    } else {
      ++j;
    }
  }
}

void Simplex::recompute_duals() {
  const int nodes = R_ + C_;
  u_.assign(static_cast<std::size_t>(R_), 0.0);
  v_.assign(static_cast<std::size_t>(C_), 0.0);
  std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    for (int e : adj_[static_cast<std::size_t>(node)]) {
      const auto& edge = edges_[static_cast<std::size_t>(e)];
      const int other = node < R_ ? col_node(edge.j) : edge.i;
      if (seen[static_cast<std::size_t>(other)]) continue;
      seen[static_cast<std::size_t>(other)] = 1;
      if (other >= R_)
        v_[static_cast<std::size_t>(other - R_)] = cost_at(edge.i, edge.j) - u_[static_cast<std::size_t>(edge.i)];
      else
        u_[static_cast<std::size_t>(other)] = cost_at(edge.i, edge.j) - v_[static_cast<std::size_t>(edge.j)];
      stack.push_back(other);
    }
  }
}

bool Simplex::refill_candidates() {
  candidates_.clear();
  // Keep the kCandidateCap most negative cells; heap ordered by rc ascending.
  std::vector<std::pair<double, std::pair<int, int>>> heap;
  for (int i = 0; i < R_; ++i) {
    const double ui = u_[static_cast<std::size_t>(i)];
    for (int j = 0; j < C_; ++j) {
      const double rc = cost_at(i, j) - ui - v_[static_cast<std::size_t>(j)];
      if (rc >= -kReducedCostTol) continue;
      if (heap.size() < static_cast<std::size_t>(kCandidateCap)) {
        heap.push_back({-rc, {i, j}});
        std::push_heap(heap.begin(), heap.end());
      } else if (-rc > heap.front().first) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = {-rc, {i, j}};
        std::push_heap(heap.begin(), heap.end());
      }
    }
  }
  for (const auto& h : heap) candidates_.push_back(h.second);
  return !candidates_.empty();
}

int Simplex::pick_entering() {
  // Returns an index into candidates_, or -1 when the list has gone stale.
  int best = -1;
  double best_rc = -kReducedCostTol;
  for (std::size_t k = 0; k < candidates_.size(); ++k) {
    const auto [i, j] = candidates_[k];
    const double rc = reduced_cost(i, j);
    if (rc < best_rc ||
        (best >= 0 && rc == best_rc &&
         std::pair{i, j} < std::pair{candidates_[static_cast<std::size_t>(best)].first,
                                     candidates_[static_cast<std::size_t>(best)].second})) {
      best = static_cast<int>(k);
      best_rc = rc;
    }
  }
  return best;
}

int Simplex::pick_entering_bland() const {
  for (int i = 0; i < R_; ++i) {
    const double ui = u_[static_cast<std::size_t>(i)];
    for (int j = 0; j < C_; ++j)
      if (cost_at(i, j) - ui - v_[static_cast<std::size_t>(j)] < -kReducedCostTol) return i * C_ + j;
  }
  return -1;
}

void Simplex::pivot(int enter_i, int enter_j) {
  // Tree path from the entering column node back to the entering row node.
  const int nodes = R_ + C_;
  std::vector<int> parent_edge(static_cast<std::size_t>(nodes), -1);
  std::vector<int> parent_node(static_cast<std::size_t>(nodes), -1);
  std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
  std::vector<int> stack{col_node(enter_j)};
  seen[static_cast<std::size_t>(col_node(enter_j))] = 1;
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    if (node == enter_i) break;
    for (int e : adj_[static_cast<std::size_t>(node)]) {
      const auto& edge = edges_[static_cast<std::size_t>(e)];
      const int other = node < R_ ? col_node(edge.j) : edge.i;
      if (seen[static_cast<std::size_t>(other)]) continue;
      seen[static_cast<std::size_t>(other)] = 1;
      parent_edge[static_cast<std::size_t>(other)] = e;
      parent_node[static_cast<std::size_t>(other)] = node;
      stack.push_back(other);
    }
  }
  // Path edges in order from the column node toward the row node; even
  // positions carry the minus sign of the alternating cycle.
  std::vector<int> path;
  for (int node = enter_i; node != col_node(enter_j); node = parent_node[static_cast<std::size_t>(node)])
    path.push_back(parent_edge[static_cast<std::size_t>(node)]);
  std::reverse(path.begin(), path.end());

  double t = std::numeric_limits<double>::infinity();
  int leave_pos = -1;
  for (std::size_t k = 0; k < path.size(); k += 2) {
    const auto& edge = edges_[static_cast<std::size_t>(path[k])];
    if (edge.flow < t ||
        (edge.flow == t && leave_pos >= 0 &&
         std::pair{edge.i, edge.j} < std::pair{edges_[static_cast<std::size_t>(path[static_cast<std::size_t>(leave_pos)])].i,
                                               edges_[static_cast<std::size_t>(path[static_cast<std::size_t>(leave_pos)])].j})) {
      t = edge.flow;
      leave_pos = static_cast<int>(k);
    }
  }

  for (std::size_t k = 0; k < path.size(); ++k) {
    auto& edge = edges_[static_cast<std::size_t>(path[k])];
    edge.flow += (k % 2 == 0) ? -t : t;
  }
  const int leave_edge = path[static_cast<std::size_t>(leave_pos)];
  detach(leave_edge);
  edges_[static_cast<std::size_t>(leave_edge)] = {enter_i, enter_j, t};
  attach(leave_edge);

  ++pivots_;
  degenerate_run_ = t < kDegenerateFlow ? degenerate_run_ + 1 : 0;
}

void Simplex::solve() {
  const std::int64_t pivot_cap = 1000ll * (R_ + C_) + 100000ll;
  recompute_duals();
  bool have_candidates = refill_candidates();
  while (true) {
    if (pivots_ > pivot_cap) throw std::runtime_error("solve_ot: pivot cap exceeded");
    if (degenerate_run_ >= kBlandTrigger) {
      // Bland's rule: first negative cell in lexicographic order; terminates
      // on any degenerate cycling that Dantzig pricing can fall into.
      const int cell = pick_entering_bland();
      if (cell < 0) break;
      pivot(cell / C_, cell % C_);
      recompute_duals();
      have_candidates = false;
      candidates_.clear();
      continue;
    }
    if (!have_candidates) {
      have_candidates = refill_candidates();
      if (!have_candidates) break;
    }
    const int k = pick_entering();
    if (k < 0) {
      have_candidates = false;
      continue;
    }
    const auto [i, j] = candidates_[static_cast<std::size_t>(k)];
    candidates_.erase(candidates_.begin() + k);
    pivot(i, j);
    recompute_duals();
  }
}

OtSolution Simplex::extract() const {
  OtSolution out;
  out.plan.rows = R_;
  out.plan.cols = C_;
  for (const auto& edge : edges_)
    if (edge.flow > 0.0) out.plan.entries.push_back({edge.i, edge.j, edge.flow});
  std::sort(out.plan.entries.begin(), out.plan.entries.end(),
            [](const TransportPlan::Entry& a, const TransportPlan::Entry& b) {
              return std::pair{a.i, a.j} < std::pair{b.i, b.j};
            });
  double loss = 0.0;
  for (const auto& entry : out.plan.entries) loss += entry.flow * cost_at(entry.i, entry.j);
  out.loss = loss;
  out.u = u_;
  out.v = v_;
  out.pivots = pivots_;
  return out;
}

}  // namespace

OtSolution solve_ot(const CostMatrix& cost, std::span<const double> p, std::span<const double> q) {
  if (cost.rows <= 0 || cost.cols <= 0 || p.size() != static_cast<std::size_t>(cost.rows) ||
      q.size() != static_cast<std::size_t>(cost.cols))
    throw std::invalid_argument("solve_ot: marginal size mismatch");
  for (double x : cost.v)
    if (!std::isfinite(x)) throw std::invalid_argument("solve_ot: non-finite cost");
  double ps = 0.0, qs = 0.0;
  for (double x : p) {
    if (x < 0.0) throw std::invalid_argument("solve_ot: negative mass");
    ps += x;
  }
  for (double x : q) {
    if (x < 0.0) throw std::invalid_argument("solve_ot: negative mass");
    qs += x;
  }
  if (std::abs(ps - qs) > 1e-9) throw std::invalid_argument("solve_ot: unbalanced marginals");
  Simplex simplex(cost, p, q);
  simplex.solve();
  return simplex.extract();
}

OtSolution solve_ot_uniform(const CostMatrix& cost) {
  std::vector<double> p(static_cast<std::size_t>(cost.rows), 1.0 / cost.rows);
  std::vector<double> q(static_cast<std::size_t>(cost.cols), 1.0 / cost.cols);
  return solve_ot(cost, p, q);
}

OtlEvaluation evaluate_otl(const Ensemble& ensemble, const CircuitSpec& spec,
                           const std::vector<LatentVector>& zs, const GroundCost& cost,
                           const Rng& rng_base) {
  OtlEvaluation eval;
  eval.matrix = cost_matrix(ensemble, spec, zs, cost, rng_base);
  std::vector<double> q(zs.size(), 1.0 / static_cast<double>(zs.size()));
  eval.solution = solve_ot(eval.matrix, ensemble.weights, q);
  return eval;
}

}  // namespace qotl
