#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qotl {

using cplx = std::complex<double>;

/// Dense n-qubit state, amplitudes indexed by the computational basis with
/// qubit 0 as the least significant bit of the index.
class Statevector {
 public:
  static Statevector zero_state(int n);
  /// Validates the size is 2^n and the norm is 1 within 1e-10.
  static Statevector from_amplitudes(int n, std::vector<cplx> amps);

  int qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cplx>& amps() const { return amps_; }
  std::vector<cplx>& amps() { return amps_; }
  cplx amp(std::size_t basis_index) const { return amps_[basis_index]; }

  double norm_sq() const;

 private:
  Statevector(int n, std::vector<cplx> amps);

  int n_ = 0;
  std::vector<cplx> amps_;
};

/// <a|b>; deterministic chunked reduction.
cplx inner_product(const Statevector& a, const Statevector& b);

/// |<a|b>|^2.
double fidelity(const Statevector& a, const Statevector& b);

}  // namespace qotl
