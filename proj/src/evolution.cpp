#include "dpt/evolution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpt/errors.hpp"

namespace dpt {

using namespace std::complex_literals;

Method parse_method(const std::string& name) {
  if (name == "exact_diag" || name == "ed") return Method::ExactDiag;
  if (name == "krylov") return Method::Krylov;
  throw ConfigError("unknown evolution method '" + name + "' (expected exact_diag or krylov)");
}

std::string to_string(Method m) { return m == Method::ExactDiag ? "exact_diag" : "krylov"; }

// ---------------------------------------------------------------------------
// Dense spectrum

DenseSpectrum::DenseSpectrum(const HamiltonianSpec& spec, int max_qubits) : n_(spec.n()) {
  check_capacity(n_, max_qubits);
  const auto terms = spec.terms();
  const std::uint64_t dim = std::uint64_t{1} << n_;

  std::vector<std::int64_t> position(dim);
  sectors_.resize(2);
  for (std::uint64_t k = 0; k < dim; ++k) {
    auto& basis = sectors_[std::popcount(k) & 1].basis;
    position[k] = static_cast<std::int64_t>(basis.size());
    basis.push_back(k);
  }
  if (n_ == 0) sectors_.pop_back();

  for (auto& sector : sectors_) {
    const auto size = static_cast<Eigen::Index>(sector.basis.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index col = 0; col < size; ++col) {
      const std::uint64_t a = sector.basis[static_cast<std::size_t>(col)];
      double diag = 0.0;
      for (int i = 0; i < n_; ++i) diag += (a >> i & 1u) ? terms.site_fields[i] : -terms.site_fields[i];
      h(col, col) = diag;
      for (std::size_t p = 0; p < terms.pair_masks.size(); ++p)
        h(position[a ^ terms.pair_masks[p]], col) += terms.pair_couplings[p];
    }
    sector.eigen = linalg::symmetric_eigen(std::move(h));
  }
}

double DenseSpectrum::min_energy() const {
  double e = std::numeric_limits<double>::infinity();
  for (const auto& s : sectors_)
    if (s.eigen.values.size() > 0) e = std::min(e, s.eigen.values.minCoeff());
  return e;
}

double DenseSpectrum::max_energy() const {
  double e = -std::numeric_limits<double>::infinity();
  for (const auto& s : sectors_)
    if (s.eigen.values.size() > 0) e = std::max(e, s.eigen.values.maxCoeff());
  return e;
}

double DenseSpectrum::mean_energy() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : sectors_) {
    sum += s.eigen.values.sum();
    count += s.basis.size();
  }
  return sum / static_cast<double>(count);
}

void DenseSpectrum::evolve(SpinState& state, double seconds) const {
  if (state.n_qubits() != n_) throw ConfigError("DenseSpectrum::evolve: qubit count mismatch");
  const double tau = 2.0 * std::numbers::pi * seconds;
  for (const auto& sector : sectors_) {
    const auto size = static_cast<Eigen::Index>(sector.basis.size());
    Eigen::VectorXd re(size), im(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const cplx a = state[sector.basis[static_cast<std::size_t>(i)]];
      re[i] = a.real();
      im[i] = a.imag();
    }
    const auto& v = sector.eigen.vectors;
    Eigen::VectorXd cre = v.transpose() * re;
    Eigen::VectorXd cim = v.transpose() * im;
    for (Eigen::Index k = 0; k < size; ++k) {
      const cplx c = cplx(cre[k], cim[k]) * std::exp(-1i * (tau * sector.eigen.values[k]));
      cre[k] = c.real();
      cim[k] = c.imag();
    }
    re.noalias() = v * cre;
    im.noalias() = v * cim;
    for (Eigen::Index i = 0; i < size; ++i) state[sector.basis[static_cast<std::size_t>(i)]] = cplx(re[i], im[i]);
  }
}

std::vector<cplx> DenseSpectrum::eigenstate(std::size_t sector, Eigen::Index k) const {
  const auto& s = sectors_.at(sector);
  std::vector<cplx> out(std::size_t{1} << n_, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < s.basis.size(); ++i) out[s.basis[i]] = s.eigen.vectors(static_cast<Eigen::Index>(i), k);
  return out;
}

// ---------------------------------------------------------------------------
// Lanczos

namespace {

// exp(-i h T) e_1 for the symmetric tridiagonal T(alpha, beta).
Eigen::VectorXcd tridiagonal_exp_e1(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double h) {
  const auto m = alpha.size();
  if (m == 1) {
    Eigen::VectorXcd out(1);
    out[0] = std::exp(-1i * (h * alpha[0]));
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  Eigen::VectorXd diag = alpha;
  Eigen::VectorXd sub = beta.head(m - 1);
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const auto& q = es.eigenvectors();
  Eigen::VectorXcd phase(m);
  for (Eigen::Index k = 0; k < m; ++k) phase[k] = std::exp(-1i * (h * es.eigenvalues()[k])) * q(0, k);
  return q.cast<cplx>() * phase;
}

}  // namespace

KrylovPropagator::KrylovPropagator(const HamiltonianSpec& spec, const EvolveOptions& options)
    : terms_(spec.terms()), options_(options) {
  check_capacity(spec.n(), options.krylov_max_qubits);
  if (options_.max_krylov_dim < 2) throw ConfigError("Krylov: max_krylov_dim must be >= 2");
  if (!(options_.tolerance > 0.0)) throw ConfigError("Krylov: tolerance must be positive");
}

void KrylovPropagator::evolve(SpinState& state, double seconds) const {
  if (state.n_qubits() != terms_.n_qubits) throw ConfigError("Krylov: qubit count mismatch");
  if (seconds < 0.0) throw ConfigError("Krylov: time must be non-negative");
  const double total = 2.0 * std::numbers::pi * seconds;
  if (total == 0.0) return;
  const std::size_t dim = state.dim();
  const int mmax = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options_.max_krylov_dim), dim));
  const double tol = options_.tolerance;

  std::vector<std::vector<cplx>> basis(static_cast<std::size_t>(mmax), std::vector<cplx>(dim));
  std::vector<cplx> w(dim);
  double remaining = total;

  while (remaining > 0.0) {
    const double beta0 = std::sqrt(kernels::omp::norm_squared(state.amplitudes()));
    if (!(beta0 > 0.0)) throw NumericError("Krylov: zero state");
    std::copy(state.amplitudes().begin(), state.amplitudes().end(), basis[0].begin());
    kernels::omp::scale(1.0 / beta0, basis[0]);

    Eigen::VectorXd alpha(mmax), beta(mmax);
    int m = 0;
    double step = remaining;
    double err = 0.0;
    bool exact = false;
    for (int j = 0; j < mmax; ++j) {
      kernels::omp::apply_ising(terms_, basis[static_cast<std::size_t>(j)], w);
      ++matvecs_;
      // Full reorthogonalization, applied twice for stability.
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const cplx c = kernels::omp::dot(basis[static_cast<std::size_t>(i)], w);
          if (pass == 0 && i == j) alpha[j] = c.real();
          kernels::omp::axpy(-c, basis[static_cast<std::size_t>(i)], w);
        }
      }
      beta[j] = std::sqrt(kernels::omp::norm_squared(w));
      m = j + 1;

      const Eigen::VectorXd a = alpha.head(m);
      const Eigen::VectorXd b = beta.head(m);
      const double scale = std::max(std::abs(a.maxCoeff()), std::abs(a.minCoeff())) + 1.0;
      if (beta[j] <= 1e-14 * scale) {
        exact = true;  // invariant subspace: the projection is exact for any step
        break;
      }
      err = beta[j] * std::abs(tridiagonal_exp_e1(a, b, step)[m - 1]);
      if (err <= tol) break;
      if (j + 1 < mmax) {
        auto& next = basis[static_cast<std::size_t>(j + 1)];
        std::copy(w.begin(), w.end(), next.begin());
        kernels::omp::scale(1.0 / beta[j], next);
      }
    }

    if (!exact && err > tol) {
      // Basis exhausted: shrink the step until the estimate is acceptable.
      const Eigen::VectorXd a = alpha.head(m);
      const Eigen::VectorXd b = beta.head(m);
      while (err > tol) {
        const double factor = std::clamp(0.9 * std::pow(tol / err, 1.0 / m), 0.1, 0.9);
        step *= factor;
        if (step < 1e-13 * total) throw SolverError("Krylov: step size collapsed", err);
        err = beta[m - 1] * std::abs(tridiagonal_exp_e1(a, b, step)[m - 1]);
      }
    }

    const Eigen::VectorXcd coeff = tridiagonal_exp_e1(alpha.head(m), beta.head(m), step);
    auto amp = state.amplitudes();
    std::fill(amp.begin(), amp.end(), cplx{0.0, 0.0});
    for (int i = 0; i < m; ++i) kernels::omp::axpy(beta0 * coeff[i], basis[static_cast<std::size_t>(i)], amp);
    remaining -= step;
    if (remaining < 1e-15 * total) remaining = 0.0;
  }
  state.normalize();
}

// ---------------------------------------------------------------------------

Propagator::Propagator(const HamiltonianSpec& spec, const EvolveOptions& options) : method_(options.method) {
  if (method_ == Method::ExactDiag)
    dense_ = std::make_unique<DenseSpectrum>(spec, options.exact_diag_max_qubits);
  else
    krylov_ = std::make_unique<KrylovPropagator>(spec, options);
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

void Propagator::evolve(SpinState& state, double seconds) const {
  if (seconds < 0.0) throw ConfigError("evolve: time must be non-negative");
  if (dense_) {
    dense_->evolve(state, seconds);
    state.normalize();
  } else {
    krylov_->evolve(state, seconds);
  }
}

SpinState evolve(const HamiltonianSpec& spec, SpinState state, double seconds, const EvolveOptions& options) {
  Propagator(spec, options).evolve(state, seconds);
  return state;
}

}  // namespace dpt
