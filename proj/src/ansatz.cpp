#include "qotl/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qotl/gates.hpp"

namespace qotl {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::vector<LatentVector> sample_latent_batch(int n_z, int count, Rng& rng) {
  std::vector<LatentVector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    LatentVector v;
    v.z.resize(static_cast<std::size_t>(n_z));
    for (double& zi : v.z) zi = rng.uniform();
    out.push_back(std::move(v));
  }
  return out;
}

CircuitSpec::CircuitSpec(int n, int n_layers, int n_z, Family family, Entangler entangler,
                         int block_size, std::vector<Axis> xi, std::vector<int> eta,
                         std::vector<double> theta)
    : n_(n),
      n_layers_(n_layers),
      n_z_(n_z),
      block_size_(block_size),
      family_(family),
      entangler_(entangler),
      xi_(std::move(xi)),
      eta_(std::move(eta)),
      theta_(std::move(theta)) {
  if (n < 1 || n_layers < 1 || n_z < 0) throw std::invalid_argument("CircuitSpec: bad shape");
  const auto slots = static_cast<std::size_t>(n) * static_cast<std::size_t>(n_layers);
  if (xi_.size() != slots || eta_.size() != slots || theta_.size() != slots)
    throw std::invalid_argument("CircuitSpec: slot array size mismatch");
  for (int e : eta_)
    if (e < 0 || e > n_z) throw std::invalid_argument("CircuitSpec: feature wire out of range");
  if (family == Family::ALA && (block_size < 1 || block_size > n))
    throw std::invalid_argument("CircuitSpec: block size out of range");
}

CircuitSpec CircuitSpec::with_theta(std::vector<double> theta) const {
  return CircuitSpec(n_, n_layers_, n_z_, family_, entangler_, block_size_, xi_, eta_,
                     std::move(theta));
}

std::vector<std::pair<int, int>> CircuitSpec::entangler_pairs(int layer) const {
  std::vector<std::pair<int, int>> pairs;
  if (family_ == Family::HEA || block_size_ >= n_) {
    for (int j = 0; j + 1 < n_; ++j) pairs.emplace_back(j, j + 1);
    return pairs;
  }
  // Odd layers shift the block grid by half a block; edge blocks are clipped.
  const int offset = (layer % 2 == 0) ? 0 : block_size_ / 2;
  const int first = offset == 0 ? 0 : offset - block_size_;
  for (int s = first; s < n_; s += block_size_) {
    const int lo = s < 0 ? 0 : s;
    const int hi = s + block_size_ < n_ ? s + block_size_ : n_;
    for (int j = lo; j + 1 < hi; ++j) pairs.emplace_back(j, j + 1);
  }
  return pairs;
}

int default_layers(int n, int n_z) { return 3 + n_z / n; }

namespace {

CircuitSpec build_random(int n, int n_layers, int n_z, Family family, Entangler ent,
                         int block_size, Rng& rng) {
  const auto slots = static_cast<std::size_t>(n) * static_cast<std::size_t>(n_layers);
  std::vector<Axis> xi(slots);
  std::vector<int> eta(slots);
  std::vector<double> theta(slots);
  for (auto& a : xi) a = static_cast<Axis>(rng.below(3));
  for (auto& e : eta) e = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_z) + 1));
  for (auto& t : theta) t = rng.uniform(0.0, kTwoPi);
  return CircuitSpec(n, n_layers, n_z, family, ent, block_size, std::move(xi), std::move(eta),
                     std::move(theta));
}

}  // namespace

CircuitSpec build_hea(int n, int n_layers, int n_z, Entangler ent, Rng& rng) {
  return build_random(n, n_layers, n_z, Family::HEA, ent, n, rng);
}

CircuitSpec build_ala(int n, int n_layers, int n_z, int block_size, Entangler ent, Rng& rng) {
  return build_random(n, n_layers, n_z, Family::ALA, ent, block_size, rng);
}

CircuitSpec redraw_theta(const CircuitSpec& spec, Rng& rng) {
  std::vector<double> theta(spec.theta().size());
  for (double& t : theta) t = rng.uniform(0.0, kTwoPi);
  return spec.with_theta(std::move(theta));
}

CircuitSpec redraw_theta_centered(const CircuitSpec& spec, Rng& rng) {
  std::vector<double> theta(spec.theta().size());
  for (double& t : theta) t = rng.normal(0.0, 1.0);
  return spec.with_theta(std::move(theta));
}

Ensemble Ensemble::uniform(std::vector<Statevector> states) {
  if (states.empty()) throw std::invalid_argument("Ensemble: empty");
  Ensemble e;
  e.weights.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  e.states = std::move(states);
  return e;
}

Statevector equator_state(int n, double phi) { return test_state(n, 0.5, phi); }

Ensemble gen_equator_ensemble(int n, int m, Rng& rng) {
  std::vector<Statevector> states;
  states.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) states.push_back(equator_state(n, rng.uniform()));
  return Ensemble::uniform(std::move(states));
}

Ensemble gen_localized_ensemble(int n, int m, double mu, double sigma, double phase_lo,
                                double phase_hi, Rng& rng) {
  std::vector<Statevector> states;
  states.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double dtheta = rng.normal(mu, sigma);
    const double dphi = rng.uniform(phase_lo, phase_hi);
    states.push_back(test_state(n, dtheta, dphi));
  }
  return Ensemble::uniform(std::move(states));
}

Ensemble gen_hard_target_ensemble(int n, int m, Rng& rng) {
  std::vector<Statevector> states;
  states.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Statevector sv = Statevector::zero_state(n);
    auto ladder = [&] {
      for (int j = 0; j + 1 < n; ++j) apply_gate_inplace(sv.amps(), n, Gate::cx(j, j + 1));
    };
    for (int j = 0; j < n; ++j)
      apply_gate_inplace(sv.amps(), n, Gate::ry(j, rng.uniform(0.0, kTwoPi)));
    ladder();
    for (int j = 0; j < n; ++j)
      apply_gate_inplace(sv.amps(), n, Gate::rz(j, rng.uniform(0.0, kTwoPi)));
    ladder();
    states.push_back(std::move(sv));
  }
  return Ensemble::uniform(std::move(states));
}

Statevector test_state(int n, double theta_t, double phi_t) {
  std::vector<cplx> amps(std::size_t{1} << n, cplx{0.0, 0.0});
  const double half = 0.5 * std::numbers::pi * theta_t;
  amps.front() = cplx{std::cos(half), 0.0};
  amps.back() = std::polar(std::sin(half), kTwoPi * phi_t);
  return Statevector::from_amplitudes(n, std::move(amps));
}

std::vector<TestPoint> gen_test_grid(int n, const std::vector<double>& thetas,
                                     const std::vector<double>& phis) {
  std::vector<TestPoint> grid;
  grid.reserve(thetas.size() * phis.size());
  for (double t : thetas)
    for (double p : phis) grid.push_back({t, p, test_state(n, t, p)});
  return grid;
}

BlochVector bloch_projection(const Statevector& sv) {
  const cplx a0 = sv.amp(0);
  const cplx a1 = sv.amp(sv.dim() - 1);
  const cplx cross = std::conj(a0) * a1;
  const double w = std::norm(a0) + std::norm(a1);
  return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(a0) - std::norm(a1), 1.0 - w};
}

CircuitSpec equator_model_spec(int n) {
  // Orbit of |1...1> under the CX ladder; the ladder cascades |0...01> back to
  // |1...1>, so the walk revisits the top state with some period p.
  const std::size_t top = (std::size_t{1} << n) - 1;
  std::size_t x = top;
  int period = 0;
  do {
    for (int j = 0; j + 1 < n; ++j)
      if (x & (std::size_t{1} << j)) x ^= std::size_t{1} << (j + 1);
    ++period;
  } while (x != top);

  // Layer 1 rotates qubit 0 by pi/4 and the ladder lifts it to a GHZ pair of
  // branches; p - 1 bare ladder layers walk the top branch to |0...01>; the
  // last layer's RZ(pi * z) on qubit 0 then imprints relative phase 2 pi z
  // before the final ladder restores |1...1>.
  const int n_layers = period + 1;
  const auto slots = static_cast<std::size_t>(n) * static_cast<std::size_t>(n_layers);
  std::vector<Axis> xi(slots, Axis::Y);
  std::vector<int> eta(slots, 0);
  std::vector<double> theta(slots, 0.0);
  theta[0] = std::numbers::pi / 4.0;
  const auto last = static_cast<std::size_t>(n_layers - 1) * static_cast<std::size_t>(n);
  xi[last] = Axis::Z;
  eta[last] = 1;
  theta[last] = std::numbers::pi;
  return CircuitSpec(n, n_layers, 1, Family::HEA, Entangler::CX, n, std::move(xi), std::move(eta),
                     std::move(theta));
}

}  // namespace qotl
