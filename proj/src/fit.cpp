#include "qotl/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qotl {

LinearFit linear_fit(std::span<const std::pair<double, double>> points) {
  const auto n = static_cast<double>(points.size());
  if (points.size() < 2) throw std::invalid_argument("linear_fit: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least three points");
  PowerLawFit best;
  bool have = false;
  for (int bi = 30; bi <= 2000; ++bi) {
    const double b = static_cast<double>(bi) / 100.0;
    // With x_i = M_i^(-1/b) the model is linear in (a, c).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [m, y] : points) {
      const double x = std::pow(m, -1.0 / b);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) continue;
    const double a = (n * sxy - sx * sy) / denom;
    const double c = (sy - a * sx) / n;
    double sse = 0;
    for (const auto& [m, y] : points) {
      const double r = a * std::pow(m, -1.0 / b) + c - y;
      sse += r * r;
    }
    if (!have || sse < best.sse) {
      best = {a, b, c, sse, false};
      have = true;
    }
  }
  if (!have) throw std::invalid_argument("fit_power_law: all scans degenerate");

  std::vector<double> abs_res;
  abs_res.reserve(points.size());
  for (const auto& [m, y] : points)
    abs_res.push_back(std::abs(best.a * std::pow(m, -1.0 / best.b) + best.c - y));
  std::vector<double> sorted = abs_res;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const double median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  for (double r : abs_res)
    if (r > 10.0 * median) best.flagged = true;
  return best;
}

}  // namespace qotl
