#pragma once

#include <vector>

#include "dpt/couplings.hpp"
#include "dpt/kernels.hpp"
#include "dpt/spin_state.hpp"

namespace dpt {

/// H = sum_{i<j} J_ij sx_i sx_j + sum_i h_i sz_i in Hz.
///
/// The site field is h_i = B + gradient (i - (N+1)/2) / (N-1) for 1-based i, so
/// the ends sit at B -/+ gradient/2. When `renormalized` is set, `bz` holds the
/// Kac-renormalized field B~z and B = field_for_ratio(couplings, bz / J0).
struct HamiltonianSpec {
  CouplingMatrix couplings;
  double bz = 0.0;
  double gradient = 0.0;
  bool renormalized = false;

  int n() const { return couplings.n(); }
  /// Field B multiplying sum_i sz_i before the gradient is added.
  double applied_field() const;
  std::vector<double> site_fields() const;
  kernels::IsingTerms terms() const;

  /// Spec for a dimensionless quench parameter r = B~z / J0.
  static HamiltonianSpec from_ratio(CouplingMatrix couplings, double ratio, double gradient = 0.0);
};

/// H|psi> (unnormalized).
std::vector<cplx> apply_hamiltonian(const HamiltonianSpec& spec, const SpinState& state);

/// <psi|H|psi>
double energy(const HamiltonianSpec& spec, const SpinState& state);

}  // namespace dpt
