#pragma once

#include <Eigen/Dense>

#include "dpt/ionchain.hpp"

namespace dpt {

/// Raman laser parameters for the spin-dependent force.
///
/// The beatnote sits at mu = nu_com + detuning_from_com. All values are in Hz.
struct LaserConfig {
  double rabi_freq = 1.0;
  double recoil_freq = 18.5e3;
  double detuning_from_com = 82e3;
  double resonance_floor = 1e3;  // minimum allowed |mu - nu_m|
  int coupling_sign = +1;        // +1: J0 > 0 (the default); -1 flips the whole matrix
};

/// Symmetric Ising coupling matrix (Hz, zero diagonal) with derived scales.
struct CouplingMatrix {
  Eigen::MatrixXd J;
  double J0 = 0.0;     // mean |J_{i,i+1}| over the central third of the chain
  double alpha = 0.0;  // fitted (or prescribed) power-law exponent
  double kac = 0.0;    // (1/N) sum_{i != j} J_ij / J0

  int n() const { return static_cast<int>(J.rows()); }
};

struct PowerLawFit {
  double J0 = 0.0;
  double alpha = 0.0;
  int excluded = 0;  // zero couplings left out of the log-log fit
};

/// Adiabatically eliminated phonon-mediated couplings
///   J_ij = Omega^2 nu_R sum_m b_im b_jm / (mu^2 - nu_m^2).
/// Throws ResonanceError naming the first mode closer than `resonance_floor` to mu.
CouplingMatrix ising_couplings(const ChainGeometry& geometry, const LaserConfig& laser);

/// Idealized J_ij = J0 / |i-j|^alpha. alpha = +inf keeps nearest neighbours only.
CouplingMatrix power_law_couplings(int n, double J0, double alpha);

/// Least-squares fit of log|J_ij| = log J0 - alpha log|i-j| over all pairs i<j.
PowerLawFit fit_power_law(const Eigen::MatrixXd& J);
inline PowerLawFit fit_power_law(const CouplingMatrix& c) { return fit_power_law(c.J); }

/// Mean |J_{i,i+1}| over the central third of the bonds (all bonds for short chains).
double central_nearest_neighbor(const Eigen::MatrixXd& J);

/// Kac constant over ordered pairs i != j; equals N-1 for uniform couplings.
double kac_norm(const Eigen::MatrixXd& J, double J0);
inline double kac_norm(const CouplingMatrix& c) { return kac_norm(c.J, c.J0); }

/// Rabi frequency giving the requested nearest-neighbour scale (J scales as Omega^2).
/// Throws ConfigError for target_J0 <= 0.
double calibrate_rabi(const ChainGeometry& geometry, LaserConfig laser, double target_J0);

/// Conversion factor s between the dimensionless field ratio r = B~z/J0 and the
/// field Bz applied in the Ising Hamiltonian: Bz = r J0 s, s = N kac / (2 (N-1)).
///
/// With this choice a uniform (alpha = 0) chain obeys
///   sum_{i<j} J0 sx_i sx_j + Bz sum sz_i = (N/2) [ (J0/N) (Sx)^2 + B~z Sz ] + const,
/// so the collective-spin critical point B~z/J0 = 1 carries over to every N.
double field_scale(const CouplingMatrix& c);
double field_for_ratio(const CouplingMatrix& c, double ratio);
double ratio_for_field(const CouplingMatrix& c, double bz);

}  // namespace dpt
