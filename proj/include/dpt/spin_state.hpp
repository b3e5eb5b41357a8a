#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace dpt {

using cplx = std::complex<double>;

/// Largest register a state vector may hold unless a caller raises the limit.
inline constexpr int kDefaultMaxQubits = 24;

/// Pure state of N qubits over the computational (z) basis.
///
/// Basis index bit (i-1) holds site i; a set bit is |up>_z (sigma^z = +1,
/// "bright" after readout).
class SpinState {
 public:
  SpinState() = default;
  /// All amplitude on |down...down>_z. Throws CapacityError beyond `max_qubits`.
  explicit SpinState(int n_qubits, int max_qubits = kDefaultMaxQubits);
  SpinState(int n_qubits, std::vector<cplx> amplitudes);

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amp_.size(); }

  std::span<cplx> amplitudes() { return amp_; }
  std::span<const cplx> amplitudes() const { return amp_; }
  cplx& operator[](std::size_t k) { return amp_[k]; }
  const cplx& operator[](std::size_t k) const { return amp_[k]; }

  double norm() const;
  void normalize();
  /// Multiplies by a global phase so the first non-negligible amplitude is real positive.
  void fix_global_phase();

 private:
  int n_ = 0;
  std::vector<cplx> amp_;
};

/// Throws CapacityError when 2^n amplitudes exceed the configured limit.
void check_capacity(int n_qubits, int max_qubits);

/// |<a|b>|^2 for normalized states.
double fidelity(const SpinState& a, const SpinState& b);

}  // namespace dpt
