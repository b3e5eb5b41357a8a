#pragma once

// Data-parallel state-vector kernels.
//
// Every kernel comes in two flavours with identical signatures: `serial` is the
// plain reference loop kept for testing and benchmarking, `omp` is the OpenMP
// version used by the library. The OpenMP reductions accumulate fixed-size
// blocks and combine them in block order, so their results do not depend on the
// thread count.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dpt/spin_state.hpp"

namespace dpt::kernels {

/// Bit-pattern form of H = sum_{i<j} J_ij sx_i sx_j + sum_i h_i sz_i.
struct IsingTerms {
  int n_qubits = 0;
  std::vector<std::uint64_t> pair_masks;  // (1<<i) | (1<<j)
  std::vector<double> pair_couplings;
  std::vector<double> site_fields;

  static IsingTerms build(const Eigen::MatrixXd& J, std::span<const double> fields);
};

namespace serial {
void apply_ising(const IsingTerms& h, std::span<const cplx> in, std::span<cplx> out);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);  // <a|b>
double norm_squared(std::span<const cplx> a);
/// <sx_i> for every site.
std::vector<double> site_sigma_x(std::span<const cplx> psi, int n_qubits);
/// sum_{i,j} <sx_i sx_j> including i == j.
double pair_sigma_x_sum(std::span<const cplx> psi, int n_qubits);
/// out = (sum_i sx_i) in.
void apply_collective_x(std::span<const cplx> in, std::span<cplx> out, int n_qubits);
}  // namespace serial

namespace omp {
void apply_ising(const IsingTerms& h, std::span<const cplx> in, std::span<cplx> out);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double norm_squared(std::span<const cplx> a);
std::vector<double> site_sigma_x(std::span<const cplx> psi, int n_qubits);
double pair_sigma_x_sum(std::span<const cplx> psi, int n_qubits);
void apply_collective_x(std::span<const cplx> in, std::span<cplx> out, int n_qubits);
/// y += a x
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);
/// x *= a
void scale(cplx a, std::span<cplx> x);
}  // namespace omp

}  // namespace dpt::kernels
