#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qotl {

struct AdamParams {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m, v;
  std::int64_t t = 0;

  static AdamState init(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0}; }
};

/// One bias-corrected update of x in place.
void adam_step(std::span<double> x, std::span<const double> grad, AdamState& state,
               const AdamParams& params);

}  // namespace qotl
