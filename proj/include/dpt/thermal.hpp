#pragma once

#include <vector>

#include "dpt/evolution.hpp"
#include "dpt/hamiltonian.hpp"

namespace dpt {

/// E0 = <down...down|_x H |down...down>_x = sum_{i<j} J_ij.
double initial_energy(const HamiltonianSpec& spec);

/// Canonical ensemble over the full spectrum of H (dense, N <= 12 by default).
/// beta is in 1/Hz and may be negative.
class ThermalEnsemble {
 public:
  explicit ThermalEnsemble(const HamiltonianSpec& spec, int max_qubits = 12);

  int n_qubits() const { return n_; }
  const std::vector<double>& energies() const { return energies_; }
  /// <n| (Sx/N)^2 |n> per eigenstate, aligned with energies().
  const std::vector<double>& c2_diagonal() const { return c2_diag_; }
  double min_energy() const { return e_min_; }
  double max_energy() const { return e_max_; }

  double mean_energy(double beta) const;
  double energy_variance(double beta) const;
  double c2(double beta) const;
  double log_partition(double beta) const;

  /// Unique root of <H>_beta = target. Throws ConfigError outside the spectrum
  /// and NumericError at a spectral edge (beta would be infinite).
  double effective_beta(double target) const;

 private:
  // Boltzmann weights normalized to sum 1, computed with an overflow-safe shift.
  std::vector<double> weights(double beta) const;

  int n_ = 0;
  std::vector<double> energies_;
  std::vector<double> c2_diag_;
  double e_min_ = 0.0, e_max_ = 0.0;
};

struct ThermalResult {
  double beta = 0.0;
  double energy_target = 0.0;
  double c2_thermal = 0.0;
  double log_z = 0.0;
};

double effective_beta(const HamiltonianSpec& spec, double energy_target);
double thermal_c2(const HamiltonianSpec& spec, double beta);

/// Thermal state at the energy of the polarized initial state.
ThermalResult thermal_comparison(const HamiltonianSpec& spec);
ThermalResult thermal_comparison(const ThermalEnsemble& ensemble, double energy_target);

}  // namespace dpt
