#include "dpt/kernels.hpp"

#include <algorithm>
#include <cstddef>

#include "dpt/errors.hpp"

namespace dpt::kernels {

namespace {

constexpr std::size_t kBlock = std::size_t{1} << 12;

inline double diagonal_field(const IsingTerms& h, std::uint64_t k) {
  double e = 0.0;
  for (int i = 0; i < h.n_qubits; ++i) e += (k >> i & 1u) ? h.site_fields[i] : -h.site_fields[i];
  return e;
}

inline cplx ising_row(const IsingTerms& h, std::span<const cplx> in, std::uint64_t k) {
  cplx acc = diagonal_field(h, k) * in[k];
  const std::size_t np = h.pair_masks.size();
  for (std::size_t p = 0; p < np; ++p) acc += h.pair_couplings[p] * in[k ^ h.pair_masks[p]];
  return acc;
}

inline double pair_row(std::span<const cplx> psi, std::uint64_t k, int n) {
  cplx flipped{0.0, 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) flipped += psi[k ^ ((std::uint64_t{1} << i) | (std::uint64_t{1} << j))];
  return (std::conj(psi[k]) * flipped).real();
}

inline cplx collective_row(std::span<const cplx> in, std::uint64_t k, int n) {
  cplx acc{0.0, 0.0};
  for (int i = 0; i < n; ++i) acc += in[k ^ (std::uint64_t{1} << i)];
  return acc;
}

std::size_t block_count(std::size_t dim) { return (dim + kBlock - 1) / kBlock; }

// Sums f(k) over [0, dim) block by block; the block partials are combined in order.
template <typename T, typename F>
T blocked_sum(std::size_t dim, F&& f) {
  const std::size_t nb = block_count(dim);
  std::vector<T> partial(nb, T{});
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(dim, lo + kBlock);
    T acc{};
    for (std::size_t k = lo; k < hi; ++k) acc += f(k);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  T total{};
  for (const auto& p : partial) total += p;
  return total;
}

void check_dims(std::size_t a, std::size_t b) {
  if (a != b) throw ConfigError("kernels: dimension mismatch");
}

}  // namespace

IsingTerms IsingTerms::build(const Eigen::MatrixXd& J, std::span<const double> fields) {
  const auto n = static_cast<int>(J.rows());
  if (J.cols() != n || static_cast<int>(fields.size()) != n) throw ConfigError("IsingTerms: size mismatch");
  IsingTerms h;
  h.n_qubits = n;
  h.site_fields.assign(fields.begin(), fields.end());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (J(i, j) == 0.0) continue;
      h.pair_masks.push_back((std::uint64_t{1} << i) | (std::uint64_t{1} << j));
      h.pair_couplings.push_back(J(i, j));
    }
  }
  return h;
}

namespace serial {

void apply_ising(const IsingTerms& h, std::span<const cplx> in, std::span<cplx> out) {
  check_dims(in.size(), out.size());
  for (std::uint64_t k = 0; k < in.size(); ++k) out[k] = ising_row(h, in, k);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  check_dims(a.size(), b.size());
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
  return acc;
}

double norm_squared(std::span<const cplx> a) {
  double acc = 0.0;
  for (const auto& v : a) acc += std::norm(v);
  return acc;
}

std::vector<double> site_sigma_x(std::span<const cplx> psi, int n_qubits) {
  std::vector<double> out(static_cast<std::size_t>(n_qubits), 0.0);
  for (int i = 0; i < n_qubits; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t k = 0; k < psi.size(); ++k) acc += (std::conj(psi[k]) * psi[k ^ bit]).real();
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

double pair_sigma_x_sum(std::span<const cplx> psi, int n_qubits) {
  double off = 0.0;
  for (std::uint64_t k = 0; k < psi.size(); ++k) off += pair_row(psi, k, n_qubits);
  return static_cast<double>(n_qubits) * norm_squared(psi) + 2.0 * off;
}

void apply_collective_x(std::span<const cplx> in, std::span<cplx> out, int n_qubits) {
  check_dims(in.size(), out.size());
  for (std::uint64_t k = 0; k < in.size(); ++k) out[k] = collective_row(in, k, n_qubits);
}

}  // namespace serial

namespace omp {

void apply_ising(const IsingTerms& h, std::span<const cplx> in, std::span<cplx> out) {
  check_dims(in.size(), out.size());
  const auto dim = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < dim; ++k) out[static_cast<std::size_t>(k)] = ising_row(h, in, static_cast<std::uint64_t>(k));
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  check_dims(a.size(), b.size());
  return blocked_sum<cplx>(a.size(), [&](std::size_t k) { return std::conj(a[k]) * b[k]; });
}

double norm_squared(std::span<const cplx> a) {
  return blocked_sum<double>(a.size(), [&](std::size_t k) { return std::norm(a[k]); });
}

std::vector<double> site_sigma_x(std::span<const cplx> psi, int n_qubits) {
  const std::size_t n = static_cast<std::size_t>(n_qubits);
  const std::size_t nb = block_count(psi.size());
  std::vector<double> partial(nb * n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(psi.size(), lo + kBlock);
    double* row = partial.data() + static_cast<std::size_t>(b) * n;
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx c = std::conj(psi[k]);
      for (std::size_t i = 0; i < n; ++i) row[i] += (c * psi[k ^ (std::uint64_t{1} << i)]).real();
    }
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t i = 0; i < n; ++i) out[i] += partial[b * n + i];
  return out;
}

double pair_sigma_x_sum(std::span<const cplx> psi, int n_qubits) {
  const double off = blocked_sum<double>(psi.size(), [&](std::size_t k) { return pair_row(psi, k, n_qubits); });
  return static_cast<double>(n_qubits) * norm_squared(psi) + 2.0 * off;
}

void apply_collective_x(std::span<const cplx> in, std::span<cplx> out, int n_qubits) {
  check_dims(in.size(), out.size());
  const auto dim = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < dim; ++k)
    out[static_cast<std::size_t>(k)] = collective_row(in, static_cast<std::uint64_t>(k), n_qubits);
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  check_dims(x.size(), y.size());
  const auto dim = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < dim; ++k) y[static_cast<std::size_t>(k)] += a * x[static_cast<std::size_t>(k)];
}

void scale(cplx a, std::span<cplx> x) {
  const auto dim = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < dim; ++k) x[static_cast<std::size_t>(k)] *= a;
}

}  // namespace omp

}  // namespace dpt::kernels
