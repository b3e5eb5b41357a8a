#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dpt/spin_state.hpp"

namespace dpt {

/// Single-qubit operator in the (|down>_z, |up>_z) basis, i.e. indexed by bit value.
using Mat2 = Eigen::Matrix2cd;

namespace pauli {
Mat2 x();
Mat2 y();
Mat2 z();
}  // namespace pauli

/// Rotation of the Bloch vector by `angle` about an equatorial axis at
/// `axis_phase` from x: exp(-i angle/2 (cos p sx + sin p sy)). A pi pulse
/// therefore inverts the Bloch vector.
struct Rotation {
  double angle = 0.0;
  double axis_phase = 0.0;

  Mat2 matrix() const;
};

/// Rotation about z (not reachable with an equatorial axis).
Mat2 z_rotation(double angle);

/// BB1 composite pulse for a target rotation (angle, phase) with every
/// rotation angle scaled by (1 + amplitude_error). The target pulse comes
/// first, followed by pi, 2pi, pi corrections at phase offsets
/// phi, 3 phi, phi from the target axis with phi = acos(-angle / (4 pi)).
Mat2 bb1_sequence(double angle, double axis_phase, double amplitude_error);

/// BB1 realization of the pi/2 rotation about y used for state preparation.
Mat2 bb1_half_pi(double amplitude_error);

/// Uncompensated pi/2 rotation about y with the same amplitude error.
Mat2 bare_half_pi(double amplitude_error);

/// 1 - |<down_x| U |down_z>|^2: the transfer error of a pi/2-about-y pulse.
double half_pi_infidelity(const Mat2& u);

/// |1 - |det U||, max |(U^dag U - 1)_ij|.
double unitarity_error(const Mat2& u);

enum class Polarization { PlusX, MinusX, PlusZ, MinusZ };
enum class Axis { X, Y, Z };

/// Product state with every spin along `direction`; global phase fixed so the
/// first nonzero amplitude is real positive. Throws CapacityError above `max_qubits`.
SpinState prepare_polarized(int n_qubits, Polarization direction, int max_qubits = kDefaultMaxQubits);

/// Prepares each site from |down>_z with its own single-qubit operator.
SpinState prepare_product(const std::vector<Mat2>& site_ops, int max_qubits = kDefaultMaxQubits);

/// Per-site pi/2 preparation pulses with amplitude errors rising linearly from
/// the chain centre (0) to the edges (`edge_error`), emulating an inhomogeneous beam.
std::vector<Mat2> inhomogeneous_preparation(int n_qubits, double edge_error, bool composite);

void apply_single_qubit(SpinState& state, int site, const Mat2& u);
void apply_to_all(SpinState& state, const Mat2& u);

/// Rotates every spin so that sigma^z of the result carries the requested axis
/// of the input: <sz_i>_out = <s^axis_i>_in.
SpinState rotate_to_measurement_basis(SpinState state, Axis axis);

/// The single-qubit operator rotate_to_measurement_basis applies.
Mat2 measurement_rotation(Axis axis);

}  // namespace dpt
