#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>
#include <vector>

#include "qotl/experiments.hpp"
#include "qotl/rng.hpp"

using namespace qotl;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<std::pair<double, double>> power_points(double a, double b, double c) {
  std::vector<std::pair<double, double>> pts;
  for (double x : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0})
    pts.push_back({x, a * std::pow(x, -1.0 / b) + c});
  return pts;
}

// Mean and standard error recomputed with the naive two-pass formulas.
std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace

TEST_CASE("power-law fits recover planted parameters", "[experiments]") {
  const PowerLawFit exact = fit_power_law(power_points(2.0, 3.0, 0.1));
  REQUIRE_THAT(exact.b, WithinAbs(3.0, 0.011));
  REQUIRE_THAT(exact.a, WithinAbs(2.0, 0.02));
  REQUIRE_THAT(exact.c, WithinAbs(0.1, 0.02));
  REQUIRE_FALSE(exact.flagged);
  REQUIRE(exact.sse < 1e-4);
}

TEST_CASE("a constant series fits as pure offset", "[experiments]") {
  std::vector<std::pair<double, double>> pts;
  for (double x : {1.0, 2.0, 4.0, 8.0, 16.0}) pts.push_back({x, 0.7});
  const PowerLawFit fit = fit_power_law(pts);
  REQUIRE_THAT(fit.a * std::pow(1.0, -1.0 / fit.b) + fit.c, WithinAbs(0.7, 1e-9));
  REQUIRE_THAT(fit.a * std::pow(16.0, -1.0 / fit.b) + fit.c, WithinAbs(0.7, 1e-9));
  REQUIRE(fit.sse < 1e-12);
}

TEST_CASE("noisy series still identify the exponent", "[experiments]") {
  Rng rng(71);
  double mean_b = 0.0;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    auto pts = power_points(1.0, 2.0, 0.05);
    for (auto& [x, y] : pts) y *= 1.0 + rng.normal(0.0, 0.03);
    mean_b += fit_power_law(pts).b;
  }
  mean_b /= reps;
  REQUIRE_THAT(mean_b, WithinAbs(2.0, 0.3));
}

TEST_CASE("an outlier point flags the fit", "[experiments]") {
  // A long series keeps the fit anchored so the spike cannot be absorbed
  // into the offset and stays an order above the median residual.
  std::vector<std::pair<double, double>> pts;
  for (int x = 1; x <= 32; ++x)
    pts.push_back({static_cast<double>(x), 1.0 / x});
  pts[3].second += 25.0;
  REQUIRE(fit_power_law(pts).flagged);
  REQUIRE_FALSE(fit_power_law(power_points(1.0, 1.0, 0.0)).flagged);
}

TEST_CASE("linear fits recover slope and intercept", "[experiments]") {
  std::vector<std::pair<double, double>> pts;
  for (double x : {0.0, 1.0, 2.0, 3.0}) pts.push_back({x, 2.5 * x - 1.0});
  const LinearFit fit = linear_fit(pts);
  REQUIRE_THAT(fit.slope, WithinAbs(2.5, 1e-12));
  REQUIRE_THAT(fit.intercept, WithinAbs(-1.0, 1e-12));
}

TEST_CASE("shared-family sweep produces complete tables", "[experiments]") {
  ScalingAConfig cfg;
  cfg.ns = {2};
  cfg.nzs = {1, 2};
  cfg.ms = {2, 4, 8};
  cfg.n_monte = 4;
  cfg.seed = 3;
  const ScalingAResult res = run_scaling_a(cfg);
  REQUIRE(res.raw.size() == 2 * 3 * 4);
  REQUIRE(res.agg.size() == 2 * 3);
  for (const auto& row : res.raw) {
    REQUIRE(row.j >= 0.0);
    REQUIRE(std::isfinite(row.j));
  }
  for (const auto& agg : res.agg) {
    REQUIRE(agg.n_monte == 4);
    std::vector<double> cell;
    for (const auto& row : res.raw)
      if (row.n == agg.n && row.n_z == agg.n_z && row.m == agg.m) cell.push_back(row.j);
    REQUIRE(cell.size() == 4);
    const auto [mean, se] = mean_stderr(cell);
    REQUIRE_THAT(agg.mean_j, WithinAbs(mean, 1e-12));
    REQUIRE_THAT(agg.stderr_j, WithinAbs(se, 1e-12));
  }
  const ScalingAResult rerun = run_scaling_a(cfg);
  REQUIRE(rerun.raw.size() == res.raw.size());
  for (std::size_t k = 0; k < res.raw.size(); ++k) REQUIRE(rerun.raw[k].j == res.raw[k].j);
}

TEST_CASE("distinct-family sweep adds one fit per cell", "[experiments]") {
  ScalingBConfig cfg;
  cfg.ns = {1, 2};
  cfg.nzs = {1};
  cfg.ms = {2, 4, 8, 16, 32};
  cfg.n_monte = 4;
  cfg.seed = 4;
  const ScalingBResult res = run_scaling_b(cfg);
  REQUIRE(res.raw.size() == 2 * 5 * 4);
  REQUIRE(res.agg.size() == 2 * 5);
  REQUIRE(res.fits.size() == 2);
  for (const auto& fit : res.fits) {
    REQUIRE(std::isfinite(fit.b));
    REQUIRE(fit.b >= 0.30);
    REQUIRE(fit.b <= 20.0);
    double largest_mean = 0.0;
    for (const auto& agg : res.agg)
      if (agg.n == fit.n && agg.n_z == fit.n_z && agg.m == 32) largest_mean = agg.mean_j;
    REQUIRE(fit.j_floor == largest_mean);
  }
}

TEST_CASE("shot-error sweep reports absolute deviations", "[experiments]") {
  ShotErrorConfig cfg;
  cfg.n = 2;
  cfg.nzs = {1};
  cfg.ms = {2, 4};
  cfg.shot_counts = {128, 1024};
  cfg.n_monte = 6;
  cfg.seed = 5;
  const ShotErrorResult res = run_shot_error(cfg);
  REQUIRE(res.raw.size() == 2 * 2 * 6);
  REQUIRE(res.agg.size() == 2 * 2);
  for (const auto& row : res.raw) {
    REQUIRE(row.abs_err >= 0.0);
    REQUIRE(row.abs_err <= 2.0);
  }
  // More shots tighten the error on average within a batch size.
  double coarse = 0.0, fine = 0.0;
  for (const auto& agg : res.agg) {
    if (agg.shots == 128) coarse += agg.mean_abs_err;
    if (agg.shots == 1024) fine += agg.mean_abs_err;
  }
  REQUIRE(fine < coarse);
}

TEST_CASE("gradient-variance sweep runs both cost arms on shared cells", "[experiments]") {
  GradVarConfig cfg;
  cfg.ns = {2, 4};
  cfg.nls = {5};
  cfg.ms = {2};
  cfg.n_monte = 24;
  cfg.seed = 6;
  const GradVarResult res = run_grad_var(cfg);
  REQUIRE(res.raw.size() == 2 * 2 * 24);
  REQUIRE(res.agg.size() == 2 * 2);
  for (const auto& agg : res.agg) {
    REQUIRE(agg.variance >= 0.0);
    REQUIRE(agg.n_monte == 24);
    std::vector<double> cell;
    for (const auto& row : res.raw)
      if (row.cost == agg.cost && row.n == agg.n && row.n_l == agg.n_l && row.m == agg.m)
        cell.push_back(row.grad);
    REQUIRE(cell.size() == 24);
    double mean = 0.0;
    for (double g : cell) mean += g;
    mean /= static_cast<double>(cell.size());
    double ss = 0.0;
    for (double g : cell) ss += (g - mean) * (g - mean);
    REQUIRE_THAT(agg.variance, WithinAbs(ss / static_cast<double>(cell.size() - 1), 1e-12));
  }
  int global_cells = 0, local_cells = 0;
  for (const auto& agg : res.agg) {
    if (agg.cost == "global") ++global_cells;
    if (agg.cost == "local") ++local_cells;
  }
  REQUIRE(global_cells == 2);
  REQUIRE(local_cells == 2);
}
