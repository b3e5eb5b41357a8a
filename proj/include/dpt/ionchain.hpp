#pragma once

#include <Eigen/Dense>

namespace dpt {

namespace constants {
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kYb171Mass = 170.9363258 * kAtomicMassUnit;
}  // namespace constants

/// Harmonic trap holding a linear ion chain. Frequencies are ordinary (not angular) Hz.
struct TrapConfig {
  int n_ions = 1;
  double nu_axial = 400e3;
  double nu_transverse = 4.85e6;
  double ion_mass = constants::kYb171Mass;
  double ion_charge = constants::kElementaryCharge;

  /// Throws ConfigError unless n_ions >= 1, frequencies are positive and
  /// the transverse confinement is the stronger one.
  void validate() const;
};

/// Equilibrium configuration and transverse normal modes of the chain.
///
/// `positions` are in metres, ascending. `mode_freqs` are in Hz sorted in
/// descending order, so column 0 of `mode_vectors` is the centre-of-mass mode.
/// Mode and position vectors stay empty until the corresponding stage has run.
struct ChainGeometry {
  Eigen::VectorXd positions;
  Eigen::VectorXd scaled_positions;  // positions / length_scale
  double length_scale = 0.0;
  Eigen::VectorXd mode_freqs;
  Eigen::MatrixXd mode_vectors;  // b(i, m)

  int n_ions() const { return static_cast<int>(positions.size()); }
  bool has_modes() const { return mode_freqs.size() == positions.size() && positions.size() > 0; }
};

/// Characteristic length l with l^3 = q^2 / (4 pi eps0 M (2 pi nu_axial)^2).
double chain_length_scale(const TrapConfig& cfg);

/// Dimensionless potential U(u) = sum u_i^2/2 + sum_{i<j} 1/|u_i - u_j|.
double chain_potential(const Eigen::VectorXd& u);
Eigen::VectorXd chain_gradient(const Eigen::VectorXd& u);
Eigen::MatrixXd chain_axial_hessian(const Eigen::VectorXd& u);

/// Transverse curvature matrix in units of the axial frequency squared.
Eigen::MatrixXd transverse_hessian(const Eigen::VectorXd& u, double frequency_ratio);

/// Damped Newton solve of the axial force balance. Fills positions and length scale.
/// Throws SolverError (with the gradient infinity-norm) if it fails to converge.
ChainGeometry equilibrium_positions(const TrapConfig& cfg);

/// Diagonalizes the transverse curvature at the given equilibrium.
/// Throws InstabilityError when any eigenvalue is non-positive.
ChainGeometry transverse_modes(const TrapConfig& cfg, ChainGeometry geometry);

/// equilibrium_positions followed by transverse_modes.
ChainGeometry solve_chain(const TrapConfig& cfg);

}  // namespace dpt
