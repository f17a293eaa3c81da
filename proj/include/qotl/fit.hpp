#pragma once

#include <span>
#include <utility>

namespace qotl {

struct LinearFit {
  double slope = 0.0, intercept = 0.0;
};

/// Least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const std::pair<double, double>> points);

struct PowerLawFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double sse = 0.0;
  /// Set when one absolute residual exceeds 10x the median absolute residual.
  bool flagged = false;
};

/// y = a * x^(-1/b) + c. b is scanned over {0.30, 0.31, ..., 20.00}; (a, c)
/// solved in closed form per b; lowest SSE wins, ties to the smaller b.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points);

}  // namespace qotl
