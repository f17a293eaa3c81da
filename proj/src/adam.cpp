#include "qotl/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace qotl {

void adam_step(std::span<double> x, std::span<const double> grad, AdamState& state,
               const AdamParams& params) {
  if (x.size() != grad.size() || x.size() != state.m.size() || x.size() != state.v.size())
    throw std::invalid_argument("adam_step: dimension mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(params.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(params.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < x.size(); ++i) {
    state.m[i] = params.beta1 * state.m[i] + (1.0 - params.beta1) * grad[i];
    state.v[i] = params.beta2 * state.v[i] + (1.0 - params.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    x[i] -= params.lr * mhat / (std::sqrt(vhat) + params.eps);
  }
}

}  // namespace qotl
