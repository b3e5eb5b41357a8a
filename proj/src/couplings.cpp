#include "dpt/couplings.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

// Bond indices [lo, hi) of the central third; every bond for short chains.
std::pair<Eigen::Index, Eigen::Index> central_bonds(Eigen::Index n) {
  if (n < 2) return {0, 0};
  const auto bonds = n - 1;
  const auto lo = bonds / 3;
  const auto hi = bonds - bonds / 3;
  if (hi <= lo) return {0, bonds};
  return {lo, hi};
}

CouplingMatrix finalize(Eigen::MatrixXd J, double alpha) {
  CouplingMatrix c;
  c.J = std::move(J);
  c.J0 = central_nearest_neighbor(c.J);
  c.kac = c.J0 > 0.0 ? kac_norm(c.J, c.J0) : 0.0;
  c.alpha = alpha;
  return c;
}

}  // namespace

double central_nearest_neighbor(const Eigen::MatrixXd& J) {
  const auto [lo, hi] = central_bonds(J.rows());
  if (hi <= lo) return 0.0;
  double sum = 0.0;
  for (auto i = lo; i < hi; ++i) sum += std::abs(J(i, i + 1));
  return sum / static_cast<double>(hi - lo);
}

double kac_norm(const Eigen::MatrixXd& J, double J0) {
  if (!(J0 > 0.0)) throw ConfigError("kac_norm: J0 must be positive");
  const auto n = J.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) sum += J(i, j);
  return std::abs(sum) / (static_cast<double>(n) * J0);
}

CouplingMatrix ising_couplings(const ChainGeometry& geometry, const LaserConfig& laser) {
  if (!geometry.has_modes()) throw ConfigError("ising_couplings: geometry has no transverse modes");
  if (laser.coupling_sign != 1 && laser.coupling_sign != -1) throw ConfigError("ising_couplings: coupling_sign must be +1 or -1");
  const auto n = geometry.n_ions();
  const double mu = geometry.mode_freqs[0] + laser.detuning_from_com;

  Eigen::VectorXd weight(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double nu = geometry.mode_freqs[m];
    if (std::abs(mu - nu) < laser.resonance_floor)
      throw ResonanceError("ising_couplings: beatnote within " + std::to_string(std::abs(mu - nu)) +
                               " Hz of mode " + std::to_string(m),
                           static_cast<int>(m));
    weight[m] = 1.0 / (mu * mu - nu * nu);
  }

  const auto& b = geometry.mode_vectors;
  Eigen::MatrixXd J = laser.rabi_freq * laser.rabi_freq * laser.recoil_freq * (b * weight.asDiagonal() * b.transpose());
  J = 0.5 * (J + J.transpose()).eval();
  J.diagonal().setZero();

  // Orient so the bulk coupling is positive, then apply the requested sign.
  double bulk = 0.0;
  const auto [lo, hi] = central_bonds(n);
  for (auto i = lo; i < hi; ++i) bulk += J(i, i + 1);
  if (bulk < 0.0) J = -J;
  if (laser.coupling_sign < 0) J = -J;

  CouplingMatrix c = finalize(std::move(J), 0.0);
  if (n >= 3) c.alpha = fit_power_law(c.J).alpha;
  return c;
}

CouplingMatrix power_law_couplings(int n, double J0, double alpha) {
  if (n < 1) throw ConfigError("power_law_couplings: n must be >= 1");
  if (!(J0 > 0.0)) throw ConfigError("power_law_couplings: J0 must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("power_law_couplings: alpha must be >= 0");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int d = std::abs(i - j);
      if (std::isinf(alpha))
        J(i, j) = d == 1 ? J0 : 0.0;
      else
        J(i, j) = J0 / std::pow(static_cast<double>(d), alpha);
    }
  }
  CouplingMatrix c = finalize(std::move(J), alpha);
  if (n == 1) c.J0 = J0;
  return c;
}

PowerLawFit fit_power_law(const Eigen::MatrixXd& J) {
  const auto n = J.rows();
  if (n < 3) throw ConfigError("fit_power_law: need at least 3 ions");
  // Normal equations for y = a - alpha x with x = log|i-j|, y = log|J_ij|.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long count = 0;
  int excluded = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::abs(J(i, j));
      if (v == 0.0) {
        ++excluded;
        continue;
      }
      const double x = std::log(static_cast<double>(j - i));
      const double y = std::log(v);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
  }
  PowerLawFit fit;
  fit.excluded = excluded;
  const double det = static_cast<double>(count) * sxx - sx * sx;
  if (count < 2 || std::abs(det) < 1e-300) {
    // All surviving couplings share one distance; no slope is identifiable.
    fit.alpha = std::numeric_limits<double>::infinity();
    fit.J0 = count > 0 ? std::exp(sy / static_cast<double>(count)) : 0.0;
    return fit;
  }
  const double slope = (static_cast<double>(count) * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / static_cast<double>(count);
  fit.alpha = -slope;
  fit.J0 = std::exp(intercept);
  return fit;
}

double calibrate_rabi(const ChainGeometry& geometry, LaserConfig laser, double target_J0) {
  if (!(target_J0 > 0.0)) throw ConfigError("calibrate_rabi: target J0 must be positive");
  laser.rabi_freq = 1.0;
  const double unit = ising_couplings(geometry, laser).J0;
  if (!(unit > 0.0)) throw NumericError("calibrate_rabi: couplings vanish at unit Rabi frequency");
  return std::sqrt(target_J0 / unit);
}

double field_scale(const CouplingMatrix& c) {
  const int n = c.n();
  if (n < 2) return 0.5;
  return static_cast<double>(n) * c.kac / (2.0 * static_cast<double>(n - 1));
}

double field_for_ratio(const CouplingMatrix& c, double ratio) { return ratio * c.J0 * field_scale(c); }

double ratio_for_field(const CouplingMatrix& c, double bz) {
  const double denom = c.J0 * field_scale(c);
  if (!(denom > 0.0)) throw ConfigError("ratio_for_field: coupling scale must be positive");
  return bz / denom;
}

}  // namespace dpt
