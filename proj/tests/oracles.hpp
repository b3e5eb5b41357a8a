#pragma once

// Brute-force reference constructions used by the unit and acceptance tests.
// Everything here is built from Kronecker products of 2x2 matrices, so it
// shares no code with the matrix-free kernels it checks.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "dpt/control.hpp"
#include "dpt/hamiltonian.hpp"
#include "dpt/spin_state.hpp"

namespace oracle {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Site i (1-based) is bit i-1 of the basis index, so it is the (i-1)-th factor
// counted from the right of the Kronecker product.
inline MatrixXcd site_operator(int n, int site, const dpt::Mat2& op) {
  MatrixXcd out = MatrixXcd::Identity(1, 1);
  for (int k = n; k >= 1; --k) {
    const MatrixXcd factor = (k == site) ? MatrixXcd(op) : MatrixXcd(MatrixXcd::Identity(2, 2));
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

inline MatrixXcd collective_x(int n) {
  const auto dim = Eigen::Index{1} << n;
  MatrixXcd s = MatrixXcd::Zero(dim, dim);
  for (int i = 1; i <= n; ++i) s += site_operator(n, i, dpt::pauli::x());
  return s;
}

inline MatrixXcd hamiltonian(const dpt::HamiltonianSpec& spec) {
  const int n = spec.n();
  const auto dim = Eigen::Index{1} << n;
  std::vector<MatrixXcd> sx, sz;
  for (int i = 1; i <= n; ++i) {
    sx.push_back(site_operator(n, i, dpt::pauli::x()));
    sz.push_back(site_operator(n, i, dpt::pauli::z()));
  }
  const auto h = spec.site_fields();
  MatrixXcd H = MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) H += spec.couplings.J(i, j) * sx[i] * sx[j];
    H += h[static_cast<std::size_t>(i)] * sz[i];
  }
  return H;
}

inline VectorXcd vec(const dpt::SpinState& s) {
  VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t k = 0; k < s.dim(); ++k) v[static_cast<Eigen::Index>(k)] = s[k];
  return v;
}

inline dpt::SpinState state(int n, const VectorXcd& v) {
  std::vector<dpt::cplx> a(v.data(), v.data() + v.size());
  return dpt::SpinState(n, std::move(a));
}

inline dpt::SpinState random_state(int n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d;
  VectorXcd v(Eigen::Index{1} << n);
  for (auto& a : v) a = {d(g), d(g)};
  v.normalize();
  return state(n, v);
}

inline Eigen::MatrixXd random_couplings(int n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) J(i, j) = J(j, i) = d(g);
  return J;
}

// exp(-i 2 pi H t) by the Pade-based matrix exponential.
inline VectorXcd propagate(const MatrixXcd& H, const VectorXcd& psi, double seconds) {
  const MatrixXcd A = (std::complex<double>(0.0, -2.0 * M_PI * seconds) * H).eval();
  return A.exp() * psi;
}

inline double expectation(const MatrixXcd& op, const VectorXcd& psi) { return psi.dot(op * psi).real(); }

}  // namespace oracle
