#include "dpt/control.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#include "dpt/errors.hpp"

namespace dpt {

using namespace std::complex_literals;

namespace pauli {
Mat2 x() { return (Mat2() << 0.0, 1.0, 1.0, 0.0).finished(); }
Mat2 y() { return (Mat2() << 0.0, 1i, -1i, 0.0).finished(); }
Mat2 z() { return (Mat2() << -1.0, 0.0, 0.0, 1.0).finished(); }
}  // namespace pauli

Mat2 Rotation::matrix() const {
  const Mat2 n = std::cos(axis_phase) * pauli::x() + std::sin(axis_phase) * pauli::y();
  return std::cos(0.5 * angle) * Mat2::Identity() - 1i * std::sin(0.5 * angle) * n;
}

Mat2 z_rotation(double angle) {
  return std::cos(0.5 * angle) * Mat2::Identity() - 1i * std::sin(0.5 * angle) * pauli::z();
}

Mat2 bb1_sequence(double angle, double axis_phase, double amplitude_error) {
  const double s = 1.0 + amplitude_error;
  const double phi = std::acos(-angle / (4.0 * std::numbers::pi));
  const Mat2 target = Rotation{angle * s, axis_phase}.matrix();
  const Mat2 pi_a = Rotation{std::numbers::pi * s, axis_phase + phi}.matrix();
  const Mat2 two_pi = Rotation{2.0 * std::numbers::pi * s, axis_phase + 3.0 * phi}.matrix();
  return pi_a * two_pi * pi_a * target;
}

Mat2 bb1_half_pi(double amplitude_error) {
  if (!(std::abs(amplitude_error) < 0.5)) throw ConfigError("bb1_half_pi: |amplitude error| must be < 0.5");
  return bb1_sequence(0.5 * std::numbers::pi, 0.5 * std::numbers::pi, amplitude_error);
}

Mat2 bare_half_pi(double amplitude_error) {
  return Rotation{0.5 * std::numbers::pi * (1.0 + amplitude_error), 0.5 * std::numbers::pi}.matrix();
}

double half_pi_infidelity(const Mat2& u) {
  const Eigen::Vector2cd start(1.0, 0.0);
  const Eigen::Vector2cd target = Eigen::Vector2cd(1.0, -1.0) / std::sqrt(2.0);
  return 1.0 - std::norm(target.dot(u * start));
}

double unitarity_error(const Mat2& u) {
  const double det_err = std::abs(1.0 - std::abs(u.determinant()));
  const double gram_err = (u.adjoint() * u - Mat2::Identity()).cwiseAbs().maxCoeff();
  return std::max(det_err, gram_err);
}

void apply_single_qubit(SpinState& state, int site, const Mat2& u) {
  if (site < 0 || site >= state.n_qubits()) throw ConfigError("apply_single_qubit: site out of range");
  const std::uint64_t bit = std::uint64_t{1} << site;
  const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  auto amp = state.amplitudes();
  const auto dim = static_cast<std::ptrdiff_t>(amp.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < dim; ++kk) {
    const auto k = static_cast<std::uint64_t>(kk);
    if (k & bit) continue;
    const cplx a0 = amp[k];
    const cplx a1 = amp[k | bit];
    amp[k] = u00 * a0 + u01 * a1;
    amp[k | bit] = u10 * a0 + u11 * a1;
  }
}

void apply_to_all(SpinState& state, const Mat2& u) {
  for (int i = 0; i < state.n_qubits(); ++i) apply_single_qubit(state, i, u);
}

SpinState prepare_product(const std::vector<Mat2>& site_ops, int max_qubits) {
  const int n = static_cast<int>(site_ops.size());
  check_capacity(n, max_qubits);
  std::vector<Eigen::Vector2cd> local(site_ops.size());
  for (std::size_t i = 0; i < site_ops.size(); ++i) local[i] = site_ops[i] * Eigen::Vector2cd(1.0, 0.0);
  std::vector<cplx> amp(std::size_t{1} << n);
  const auto dim = static_cast<std::ptrdiff_t>(amp.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < dim; ++kk) {
    const auto k = static_cast<std::uint64_t>(kk);
    cplx a = 1.0;
    for (int i = 0; i < n; ++i) a *= local[static_cast<std::size_t>(i)][(k >> i) & 1u];
    amp[k] = a;
  }
  SpinState state(n, std::move(amp));
  state.fix_global_phase();
  return state;
}

SpinState prepare_polarized(int n_qubits, Polarization direction, int max_qubits) {
  check_capacity(n_qubits, max_qubits);
  const double h = 1.0 / std::sqrt(2.0);
  Mat2 op = Mat2::Identity();  // acts on |down>_z
  switch (direction) {
    case Polarization::MinusZ: break;
    case Polarization::PlusZ: op = pauli::x(); break;
    case Polarization::MinusX: op << h, 0.0, -h, 0.0; break;
    case Polarization::PlusX: op << h, 0.0, h, 0.0; break;
  }
  return prepare_product(std::vector<Mat2>(static_cast<std::size_t>(n_qubits), op), max_qubits);
}

std::vector<Mat2> inhomogeneous_preparation(int n_qubits, double edge_error, bool composite) {
  std::vector<Mat2> ops;
  ops.reserve(static_cast<std::size_t>(n_qubits));
  const double centre = 0.5 * (n_qubits - 1);
  for (int i = 0; i < n_qubits; ++i) {
    const double eps = n_qubits > 1 ? edge_error * std::abs(i - centre) / centre : 0.0;
    ops.push_back(composite ? bb1_half_pi(eps) : bare_half_pi(eps));
  }
  return ops;
}

Mat2 measurement_rotation(Axis axis) {
  switch (axis) {
    case Axis::X: return Rotation{-0.5 * std::numbers::pi, 0.5 * std::numbers::pi}.matrix();
    case Axis::Y: return Rotation{0.5 * std::numbers::pi, 0.0}.matrix();
    case Axis::Z: break;
  }
  return Mat2::Identity();
}

SpinState rotate_to_measurement_basis(SpinState state, Axis axis) {
  if (axis != Axis::Z) apply_to_all(state, measurement_rotation(axis));
  return state;
}

}  // namespace dpt
