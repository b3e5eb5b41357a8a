#include "dpt/spin_state.hpp"

#include <cmath>
#include <string>

#include "dpt/errors.hpp"
#include "dpt/kernels.hpp"

namespace dpt {

void check_capacity(int n_qubits, int max_qubits) {
  if (n_qubits < 1) throw ConfigError("state: need at least one qubit");
  if (n_qubits > max_qubits || n_qubits > 62)
    throw CapacityError("state: " + std::to_string(n_qubits) + " qubits exceeds the limit of " +
                        std::to_string(max_qubits));
}

SpinState::SpinState(int n_qubits, int max_qubits) : n_(n_qubits) {
  check_capacity(n_qubits, max_qubits);
  amp_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amp_[0] = 1.0;
}

SpinState::SpinState(int n_qubits, std::vector<cplx> amplitudes) : n_(n_qubits), amp_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > 62 || amp_.size() != (std::size_t{1} << n_qubits))
    throw ConfigError("state: amplitude count does not match 2^n_qubits");
}

double SpinState::norm() const { return std::sqrt(kernels::omp::norm_squared(amp_)); }

void SpinState::normalize() {
  const double nrm = norm();
  if (!(nrm > 0.0)) throw NumericError("state: cannot normalize the zero vector");
  kernels::omp::scale(1.0 / nrm, amp_);
}

void SpinState::fix_global_phase() {
  for (const auto& a : amp_) {
    if (std::abs(a) > 1e-14) {
      const cplx phase = std::conj(a) / std::abs(a);
      kernels::omp::scale(phase, amp_);
      return;
    }
  }
}

double fidelity(const SpinState& a, const SpinState& b) {
  if (a.dim() != b.dim()) throw ConfigError("fidelity: dimension mismatch");
  return std::norm(kernels::omp::dot(a.amplitudes(), b.amplitudes()));
}

}  // namespace dpt
