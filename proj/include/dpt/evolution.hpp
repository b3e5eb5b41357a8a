#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dpt/hamiltonian.hpp"
#include "dpt/linalg.hpp"
#include "dpt/spin_state.hpp"

namespace dpt {

enum class Method { ExactDiag, Krylov };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct EvolveOptions {
  Method method = Method::Krylov;
  double tolerance = 1e-10;  // Krylov local error target per step
  int max_krylov_dim = 40;
  int exact_diag_max_qubits = 12;
  int krylov_max_qubits = kDefaultMaxQubits;
};

/// Full spectrum of H split into the two sz-parity sectors (H conserves prod_i sz_i).
class DenseSpectrum {
 public:
  struct Sector {
    std::vector<std::uint64_t> basis;  // computational indices in this sector
    linalg::SymmetricEigen eigen;
  };

  explicit DenseSpectrum(const HamiltonianSpec& spec, int max_qubits = 12);

  int n_qubits() const { return n_; }
  const std::vector<Sector>& sectors() const { return sectors_; }
  double min_energy() const;
  double max_energy() const;
  /// Tr(H) / 2^N
  double mean_energy() const;

  /// psi <- exp(-i 2 pi H t) psi with t in seconds (H in Hz).
  void evolve(SpinState& state, double seconds) const;

  /// Column `k` of sector `s` expanded onto the full computational basis.
  std::vector<cplx> eigenstate(std::size_t sector, Eigen::Index k) const;

 private:
  int n_ = 0;
  std::vector<Sector> sectors_;
};

/// Adaptive-order Lanczos propagator.
///
/// Each step grows a Krylov basis up to `max_krylov_dim`, accepts the largest
/// sub-step whose a-posteriori error estimate beta_m |[exp(-i h T_m) e_1]_m|
/// stays below the tolerance, and restarts from the propagated vector.
class KrylovPropagator {
 public:
  KrylovPropagator(const HamiltonianSpec& spec, const EvolveOptions& options);

  /// psi <- exp(-i 2 pi H t) psi. Throws SolverError when the step size collapses.
  void evolve(SpinState& state, double seconds) const;

  int matvec_count() const { return matvecs_; }

 private:
  kernels::IsingTerms terms_;
  EvolveOptions options_;
  mutable int matvecs_ = 0;
};

/// Stateless front end over both methods.
class Propagator {
 public:
  Propagator(const HamiltonianSpec& spec, const EvolveOptions& options);
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) noexcept;

  void evolve(SpinState& state, double seconds) const;
  Method method() const { return method_; }
  /// The dense spectrum when the method is ExactDiag, otherwise nullptr.
  const DenseSpectrum* spectrum() const { return dense_.get(); }

 private:
  Method method_;
  std::unique_ptr<DenseSpectrum> dense_;
  std::unique_ptr<KrylovPropagator> krylov_;
};

/// exp(-i 2 pi H t)|psi>, normalized. Capacity: ExactDiag up to
/// options.exact_diag_max_qubits, Krylov up to options.krylov_max_qubits.
SpinState evolve(const HamiltonianSpec& spec, SpinState state, double seconds, const EvolveOptions& options = {});

}  // namespace dpt
