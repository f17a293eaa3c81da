#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qotl/rng.hpp"
#include "qotl/statevector.hpp"

namespace qotl {

enum class Family { HEA, ALA };
enum class Entangler { CZ, CX };
enum class Axis { X, Y, Z };

/// Latent point z in [0,1)^k. Component 0 of the padded view is the constant
/// bias 1, so rotation slots wired to feature 0 have a z-independent angle.
struct LatentVector {
  std::vector<double> z;

  int dim() const { return static_cast<int>(z.size()); }
  /// feature index 0 is the bias; 1..dim() map to z[0..dim()-1].
  double feature(int idx) const { return idx == 0 ? 1.0 : z[static_cast<std::size_t>(idx) - 1]; }
};

std::vector<LatentVector> sample_latent_batch(int n_z, int count, Rng& rng);

/// Layered rotation circuit: layer l applies one rotation per qubit followed
/// by this layer's entangler ladder. Slot (l, q) has a fixed axis xi and a
/// fixed feature wire eta; its angle is theta[slot] * feature(eta[slot]).
/// Flattened slot index = l * n + q. xi and eta are frozen at construction;
/// theta is replaced wholesale via with_theta.
class CircuitSpec {
 public:
  CircuitSpec(int n, int n_layers, int n_z, Family family, Entangler entangler, int block_size,
              std::vector<Axis> xi, std::vector<int> eta, std::vector<double> theta);

  int qubits() const { return n_; }
  int layers() const { return n_layers_; }
  int latent_dim() const { return n_z_; }
  Family family() const { return family_; }
  Entangler entangler() const { return entangler_; }
  int block_size() const { return block_size_; }
  int param_count() const { return n_ * n_layers_; }

  const std::vector<Axis>& xi() const { return xi_; }
  const std::vector<int>& eta() const { return eta_; }
  const std::vector<double>& theta() const { return theta_; }

  CircuitSpec with_theta(std::vector<double> theta) const;

  /// Entangler pairs of layer l (0-based), in application order.
  std::vector<std::pair<int, int>> entangler_pairs(int layer) const;

  /// Total rotation angle of a slot at latent point z.
  double slot_angle(int slot, const LatentVector& z) const {
    return theta_[static_cast<std::size_t>(slot)] * z.feature(eta_[static_cast<std::size_t>(slot)]);
  }

 private:
  int n_, n_layers_, n_z_, block_size_;
  Family family_;
  Entangler entangler_;
  std::vector<Axis> xi_;
  std::vector<int> eta_;
  std::vector<double> theta_;
};

/// Default depth 3 + floor(n_z / n).
int default_layers(int n, int n_z);

/// Hardware-efficient family: full-width ladder every layer; axes uniform
/// over {X,Y,Z}, wires uniform over {0..n_z}, theta uniform over [0, 2pi).
CircuitSpec build_hea(int n, int n_layers, int n_z, Entangler ent, Rng& rng);

/// Alternating-block family: ladder pairs restricted to blocks of block_size
/// qubits, offset by block_size/2 on odd layers; edge blocks are clipped.
CircuitSpec build_ala(int n, int n_layers, int n_z, int block_size, Entangler ent, Rng& rng);

/// Fresh theta ~ U[0, 2pi) for every slot.
CircuitSpec redraw_theta(const CircuitSpec& spec, Rng& rng);

/// Fresh theta ~ N(0, 1) for every slot. Training init: a zero-centered start
/// keeps the latent-to-angle map gently wound, which descends reliably where
/// full-period starts stall in ripple. Monte-Carlo draws over fixed random
/// parameters keep the uniform convention.
CircuitSpec redraw_theta_centered(const CircuitSpec& spec, Rng& rng);

/// Weighted collection of states; weights sum to 1.
struct Ensemble {
  std::vector<Statevector> states;
  std::vector<double> weights;

  static Ensemble uniform(std::vector<Statevector> states);
  int size() const { return static_cast<int>(states.size()); }
};

/// cos(pi/4)|0...0> + e^{2 pi i phi} sin(pi/4)|1...1>, phi ~ U[0,1).
Statevector equator_state(int n, double phi);
Ensemble gen_equator_ensemble(int n, int m, Rng& rng);

/// cos(pi dtheta / 2)|0...0> + e^{2 pi i dphi} sin(pi dtheta / 2)|1...1>,
/// dtheta ~ N(mu, sigma), dphi ~ U[phase_lo, phase_hi).
Ensemble gen_localized_ensemble(int n, int m, double mu, double sigma, double phase_lo,
                                double phase_hi, Rng& rng);

/// Two-layer product-plus-ladder states W' R_Z(zeta2) W' R_Y(zeta1) |0>, with
/// W' the CX ladder; each member draws its own angle vectors.
Ensemble gen_hard_target_ensemble(int n, int m, Rng& rng);

struct TestPoint {
  double theta_t, phi_t;
  Statevector state;
};

/// cos(pi theta_t / 2)|0...0> + e^{2 pi i phi_t} sin(pi theta_t / 2)|1...1>.
Statevector test_state(int n, double theta_t, double phi_t);
std::vector<TestPoint> gen_test_grid(int n, const std::vector<double>& thetas,
                                     const std::vector<double>& phis);

struct BlochVector {
  double x, y, z;
  /// Probability weight outside span{|0...0>, |1...1>}.
  double residual;
};

/// Bloch coordinates of the projection onto span{|0...0>, |1...1>}.
BlochVector bloch_projection(const Statevector& sv);

/// Closed-form generator of the equator family: one latent feature, and the
/// output state is equator_state(n, z + const) for every z. Used as the
/// reference model when scoring how anomalous a test state is.
CircuitSpec equator_model_spec(int n);

}  // namespace qotl
