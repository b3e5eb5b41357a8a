#include "dpt/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "dpt/errors.hpp"

namespace dpt {

double initial_energy(const HamiltonianSpec& spec) {
  const auto& J = spec.couplings.J;
  double e = 0.0;
  for (Eigen::Index i = 0; i < J.rows(); ++i)
    for (Eigen::Index j = i + 1; j < J.cols(); ++j) e += J(i, j);
  return e;
}

ThermalEnsemble::ThermalEnsemble(const HamiltonianSpec& spec, int max_qubits) : n_(spec.n()) {
  const DenseSpectrum spectrum(spec, max_qubits);
  const auto terms = spec.terms();
  const double n2 = static_cast<double>(n_) * n_;

  for (const auto& sector : spectrum.sectors()) {
    const auto& V = sector.eigen.vectors;
    const auto size = static_cast<Eigen::Index>(sector.basis.size());
    std::vector<std::int64_t> position(std::size_t{1} << n_, -1);
    for (Eigen::Index i = 0; i < size; ++i) position[sector.basis[static_cast<std::size_t>(i)]] = i;

    std::vector<double> diag(static_cast<std::size_t>(size));
    // <v| (Sx)^2 |v> = N + 2 sum_{i<j} <v| sx_i sx_j |v>; the pair flips stay in the sector
#pragma omp parallel for schedule(static)
    for (Eigen::Index col = 0; col < size; ++col) {
      double acc = 0.0;
      for (Eigen::Index row = 0; row < size; ++row) {
        const std::uint64_t a = sector.basis[static_cast<std::size_t>(row)];
        double flipped = 0.0;
        for (std::uint64_t mask : terms.pair_masks) flipped += V(position[a ^ mask], col);
        acc += V(row, col) * flipped;
      }
      diag[static_cast<std::size_t>(col)] = (n_ + 2.0 * acc) / n2;
    }
    for (Eigen::Index k = 0; k < size; ++k) {
      energies_.push_back(sector.eigen.values[k]);
      c2_diag_.push_back(diag[static_cast<std::size_t>(k)]);
    }
  }
  e_min_ = *std::min_element(energies_.begin(), energies_.end());
  e_max_ = *std::max_element(energies_.begin(), energies_.end());
}

std::vector<double> ThermalEnsemble::weights(double beta) const {
  const double ref = beta >= 0.0 ? e_min_ : e_max_;
  std::vector<double> w(energies_.size());
  double z = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = std::exp(-beta * (energies_[k] - ref));
    z += w[k];
  }
  for (double& v : w) v /= z;
  return w;
}

double ThermalEnsemble::mean_energy(double beta) const {
  const auto w = weights(beta);
  double e = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) e += w[k] * energies_[k];
  return e;
}

double ThermalEnsemble::energy_variance(double beta) const {
  const auto w = weights(beta);
  const double mean = mean_energy(beta);
  double v = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) v += w[k] * (energies_[k] - mean) * (energies_[k] - mean);
  return v;
}

double ThermalEnsemble::c2(double beta) const {
  const auto w = weights(beta);
  double c = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) c += w[k] * c2_diag_[k];
  return c;
}

double ThermalEnsemble::log_partition(double beta) const {
  const double ref = beta >= 0.0 ? e_min_ : e_max_;
  double z = 0.0;
  for (double e : energies_) z += std::exp(-beta * (e - ref));
  return -beta * ref + std::log(z);
}

double ThermalEnsemble::effective_beta(double target) const {
  const double width = e_max_ - e_min_;
  if (!(width > 0.0)) throw NumericError("effective_beta: the spectrum is a single level");
  if (target < e_min_ - 1e-12 * width || target > e_max_ + 1e-12 * width)
    throw ConfigError("effective_beta: target energy lies outside the spectrum");
  if (target - e_min_ <= 1e-10 * width || e_max_ - target <= 1e-10 * width)
    throw NumericError("effective_beta: target energy sits at a spectral edge (|beta| = inf)");

  const auto f = [&](double b) { return mean_energy(b) - target; };
  const double f0 = f(0.0);
  if (f0 == 0.0) return 0.0;
  // <H>_beta decreases with beta: positive f0 means the root is at beta > 0
  const double dir = f0 > 0.0 ? 1.0 : -1.0;
  double lo = 0.0, hi = dir / width;
  while (dir * f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (std::abs(hi) > 1e6 / width) throw NumericError("effective_beta: failed to bracket the root");
  }
  double a = std::min(lo, hi), b = std::max(lo, hi);
  std::uintmax_t iters = 200;
  const auto [x0, x1] = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(50), iters);
  double beta = 0.5 * (x0 + x1);
  // Newton polish: d<H>/dbeta = -Var(H)
  for (int k = 0; k < 3; ++k) {
    const double var = energy_variance(beta);
    if (!(var > 0.0)) break;
    const double next = beta + f(beta) / var;
    if (next < a || next > b) break;
    beta = next;
  }
  return beta;
}

double effective_beta(const HamiltonianSpec& spec, double energy_target) {
  return ThermalEnsemble(spec).effective_beta(energy_target);
}

double thermal_c2(const HamiltonianSpec& spec, double beta) { return ThermalEnsemble(spec).c2(beta); }

ThermalResult thermal_comparison(const ThermalEnsemble& ensemble, double energy_target) {
  ThermalResult r;
  r.energy_target = energy_target;
  r.beta = ensemble.effective_beta(energy_target);
  r.c2_thermal = ensemble.c2(r.beta);
  r.log_z = ensemble.log_partition(r.beta);
  return r;
}

ThermalResult thermal_comparison(const HamiltonianSpec& spec) {
  return thermal_comparison(ThermalEnsemble(spec), initial_energy(spec));
}

}  // namespace dpt
