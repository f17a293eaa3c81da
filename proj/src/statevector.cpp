#include "qotl/statevector.hpp"

#include <cmath>
#include <stdexcept>

#include "qotl/parallel.hpp"

namespace qotl {

namespace {
constexpr int kMaxQubits = 24;  // dense vectors above this are a caller bug
}

Statevector::Statevector(int n, std::vector<cplx> amps) : n_(n), amps_(std::move(amps)) {}

Statevector Statevector::zero_state(int n) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("zero_state: qubit count out of range");
  std::vector<cplx> amps(std::size_t{1} << n, cplx{0.0, 0.0});
  amps[0] = cplx{1.0, 0.0};
  return Statevector(n, std::move(amps));
}

Statevector Statevector::from_amplitudes(int n, std::vector<cplx> amps) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("from_amplitudes: qubit count out of range");
  if (amps.size() != (std::size_t{1} << n))
    throw std::invalid_argument("from_amplitudes: size is not 2^n");
  Statevector sv(n, std::move(amps));
  if (std::abs(sv.norm_sq() - 1.0) > 1e-10)
    throw std::invalid_argument("from_amplitudes: state is not normalized");
  return sv;
}

double Statevector::norm_sq() const {
  return par::sum_chunked(amps_.size(), [&](std::size_t i) { return std::norm(amps_[i]); });
}

cplx inner_product(const Statevector& a, const Statevector& b) {
  if (a.qubits() != b.qubits()) throw std::invalid_argument("inner_product: qubit count mismatch");
  const auto& x = a.amps();
  const auto& y = b.amps();
  const double re = par::sum_chunked(
      x.size(), [&](std::size_t i) { return x[i].real() * y[i].real() + x[i].imag() * y[i].imag(); });
  const double im = par::sum_chunked(
      x.size(), [&](std::size_t i) { return x[i].real() * y[i].imag() - x[i].imag() * y[i].real(); });
  return cplx{re, im};
}

double fidelity(const Statevector& a, const Statevector& b) {
  const cplx ip = inner_product(a, b);
  return std::norm(ip);
}

}  // namespace qotl
