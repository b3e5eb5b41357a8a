#include "dpt/ionchain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "dpt/errors.hpp"

namespace dpt {

void TrapConfig::validate() const {
  if (n_ions < 1) throw ConfigError("trap: n_ions must be >= 1");
  if (!(nu_axial > 0.0) || !(nu_transverse > 0.0)) throw ConfigError("trap: frequencies must be positive");
  if (!(nu_transverse > nu_axial)) throw ConfigError("trap: nu_transverse must exceed nu_axial for a linear chain");
  if (!(ion_mass > 0.0) || !(ion_charge > 0.0)) throw ConfigError("trap: mass and charge must be positive");
}

double chain_length_scale(const TrapConfig& cfg) {
  const double omega = 2.0 * std::numbers::pi * cfg.nu_axial;
  const double coulomb = cfg.ion_charge * cfg.ion_charge / (4.0 * std::numbers::pi * constants::kVacuumPermittivity);
  return std::cbrt(coulomb / (cfg.ion_mass * omega * omega));
}

double chain_potential(const Eigen::VectorXd& u) {
  const auto n = u.size();
  double energy = 0.5 * u.squaredNorm();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) energy += 1.0 / std::abs(u[i] - u[j]);
  return energy;
}

Eigen::VectorXd chain_gradient(const Eigen::VectorXd& u) {
  const auto n = u.size();
  Eigen::VectorXd g = u;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const double d = u[i] - u[k];
      g[i] -= std::copysign(1.0 / (d * d), d);
    }
  }
  return g;
}

Eigen::MatrixXd chain_axial_hessian(const Eigen::VectorXd& u) {
  const auto n = u.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const double c = 2.0 / std::pow(std::abs(u[i] - u[k]), 3);
      h(i, i) += c;
      h(i, k) = -c;
    }
  }
  return h;
}

Eigen::MatrixXd transverse_hessian(const Eigen::VectorXd& u, double frequency_ratio) {
  const auto n = u.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = frequency_ratio * frequency_ratio;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const double c = 1.0 / std::pow(std::abs(u[i] - u[k]), 3);
      a(i, i) -= c;
      a(i, k) = c;
    }
  }
  return a;
}

ChainGeometry equilibrium_positions(const TrapConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_ions;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (n > 1) {
    const double half_width = std::pow(static_cast<double>(n), 0.56);
    u = Eigen::VectorXd::LinSpaced(n, -half_width, half_width);

    constexpr int kMaxIterations = 200;
    constexpr double kTolerance = 1e-12;
    double residual = chain_gradient(u).lpNorm<Eigen::Infinity>();
    int iter = 0;
    for (; iter < kMaxIterations && residual > kTolerance; ++iter) {
      const Eigen::VectorXd g = chain_gradient(u);
      const Eigen::VectorXd step = chain_axial_hessian(u).ldlt().solve(-g);
      const double u0 = chain_potential(u);
      // Backtrack until the potential decreases and the ordering survives.
      double damping = 1.0;
      Eigen::VectorXd trial = u + step;
      auto ordered = [](const Eigen::VectorXd& v) {
        for (Eigen::Index i = 1; i < v.size(); ++i)
          if (!(v[i] > v[i - 1])) return false;
        return true;
      };
      while (damping > 1e-8 && (!ordered(trial) || chain_potential(trial) > u0 + 1e-14 * std::abs(u0))) {
        damping *= 0.5;
        trial = u + damping * step;
      }
      u = trial;
      residual = chain_gradient(u).lpNorm<Eigen::Infinity>();
    }
    if (residual > kTolerance) throw SolverError("equilibrium_positions: Newton iteration did not converge", residual);
    // Enforce exact mirror symmetry; the solve already satisfies it to rounding.
    for (int i = 0; i < n / 2; ++i) {
      const double s = 0.5 * (u[n - 1 - i] - u[i]);
      u[i] = -s;
      u[n - 1 - i] = s;
    }
    if (n % 2 == 1) u[n / 2] = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(chain_axial_hessian(u));
    if (llt.info() != Eigen::Success) throw SolverError("equilibrium_positions: stationary point is not a minimum", residual);
  }

  ChainGeometry geometry;
  geometry.length_scale = chain_length_scale(cfg);
  geometry.scaled_positions = u;
  geometry.positions = u * geometry.length_scale;
  return geometry;
}

ChainGeometry transverse_modes(const TrapConfig& cfg, ChainGeometry geometry) {
  cfg.validate();
  const auto n = geometry.scaled_positions.size();
  if (n != cfg.n_ions) throw ConfigError("transverse_modes: geometry does not match trap ion count");

  const Eigen::MatrixXd a = transverse_hessian(geometry.scaled_positions, cfg.nu_transverse / cfg.nu_axial);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw NumericError("transverse_modes: eigen-decomposition failed");

  const Eigen::VectorXd& lambda = solver.eigenvalues();
  for (Eigen::Index m = 0; m < n; ++m) {
    if (!(lambda[m] > 0.0))
      throw InstabilityError("transverse_modes: mode " + std::to_string(m) +
                             " has non-positive curvature; the chain would buckle");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return lambda[l] > lambda[r]; });

  geometry.mode_freqs.resize(n);
  geometry.mode_vectors.resize(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const auto src = order[static_cast<std::size_t>(m)];
    geometry.mode_freqs[m] = cfg.nu_axial * std::sqrt(lambda[src]);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    geometry.mode_vectors.col(m) = v;
  }
  return geometry;
}

ChainGeometry solve_chain(const TrapConfig& cfg) { return transverse_modes(cfg, equilibrium_positions(cfg)); }

}  // namespace dpt
