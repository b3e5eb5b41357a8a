#include "dpt/hamiltonian.hpp"

#include "dpt/errors.hpp"

namespace dpt {

double HamiltonianSpec::applied_field() const {
  if (!renormalized) return bz;
  if (!(couplings.J0 > 0.0)) throw ConfigError("HamiltonianSpec: renormalized field needs J0 > 0");
  return field_for_ratio(couplings, bz / couplings.J0);
}

std::vector<double> HamiltonianSpec::site_fields() const {
  const int n = this->n();
  const double b = applied_field();
  std::vector<double> h(static_cast<std::size_t>(n), b);
  if (n > 1 && gradient != 0.0) {
    for (int i = 1; i <= n; ++i)
      h[static_cast<std::size_t>(i - 1)] += gradient * (i - 0.5 * (n + 1)) / static_cast<double>(n - 1);
  }
  return h;
}

kernels::IsingTerms HamiltonianSpec::terms() const {
  const auto fields = site_fields();
  return kernels::IsingTerms::build(couplings.J, fields);
}

HamiltonianSpec HamiltonianSpec::from_ratio(CouplingMatrix couplings, double ratio, double gradient) {
  HamiltonianSpec spec;
  spec.bz = ratio * couplings.J0;
  spec.couplings = std::move(couplings);
  spec.gradient = gradient;
  spec.renormalized = true;
  return spec;
}

std::vector<cplx> apply_hamiltonian(const HamiltonianSpec& spec, const SpinState& state) {
  if (spec.n() != state.n_qubits()) throw ConfigError("apply_hamiltonian: qubit count mismatch");
  std::vector<cplx> out(state.dim());
  kernels::omp::apply_ising(spec.terms(), state.amplitudes(), out);
  return out;
}

double energy(const HamiltonianSpec& spec, const SpinState& state) {
  const auto h_psi = apply_hamiltonian(spec, state);
  return kernels::omp::dot(state.amplitudes(), h_psi).real();
}

}  // namespace dpt
