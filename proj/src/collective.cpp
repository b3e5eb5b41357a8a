#include "dpt/collective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "dpt/errors.hpp"
#include "dpt/linalg.hpp"
#include "dpt/observables.hpp"

namespace dpt {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_ratio(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("collective: r must be finite and non-negative");
}

template <class F>
double integrate(F f, double a, double b, const char* what) {
  if (b <= a) return 0.0;
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13, &err);
  if (!std::isfinite(value) || err > 1e-9 * std::max(std::abs(value), 1e-300))
    throw NumericError(std::string(what) + ": quadrature tolerance not met (error estimate " + std::to_string(err) + ")");
  return value;
}

// r^2 - sin^2 theta without cancellation near r = 1, theta = pi/2
double gap(double r, double theta) {
  const double c = std::cos(theta);
  return (r - 1.0) * (r + 1.0) + c * c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Semiclassics

SemiclassicalTrajectory semiclassical_trajectory(double r, const std::vector<double>& tau_grid, double tolerance) {
  check_ratio(r);
  if (tau_grid.empty()) throw ConfigError("semiclassical_trajectory: empty grid");
  if (tau_grid.front() < 0.0) throw ConfigError("semiclassical_trajectory: grid must start at or after 0");
  for (std::size_t k = 1; k < tau_grid.size(); ++k)
    if (!(tau_grid[k] > tau_grid[k - 1])) throw ConfigError("semiclassical_trajectory: grid must be ascending");

  // x, y, z, int x^2, winding angle
  using State = std::array<double, 5>;
  const auto rhs = [r](const State& s, State& d, double) {
    d[0] = -2.0 * r * s[1];
    d[1] = 2.0 * r * s[0] - 4.0 * s[0] * s[2];
    d[2] = 4.0 * s[0] * s[1];
    d[3] = s[0] * s[0];
    d[4] = r > 1.0 ? 2.0 * std::sqrt(std::max(gap(r, s[4]), 0.0)) : 0.0;
  };

  std::vector<double> times;
  if (tau_grid.front() > 0.0) times.push_back(0.0);
  times.insert(times.end(), tau_grid.begin(), tau_grid.end());

  SemiclassicalTrajectory out;
  const bool skip_first = tau_grid.front() > 0.0;
  double reached = 0.0;
  bool first = true;
  const auto observe = [&](const State& s, double t) {
    reached = t;
    if (first && skip_first) {
      first = false;
      return;
    }
    first = false;
    out.tau.push_back(t);
    out.x.push_back(s[0]);
    out.y.push_back(s[1]);
    out.z.push_back(s[2]);
    out.c2_integral.push_back(s[3]);
    out.magnetization.push_back(s[0]);
    out.c2.push_back(s[0] * s[0]);
    out.theta.push_back(r > 1.0 ? s[4] : std::acos(std::clamp(s[0], -1.0, 1.0)));
  };

  namespace ode = boost::numeric::odeint;
  State s{1.0, 0.0, 0.0, 0.0, 0.0};
  try {
    if (times.size() == 1) {
      observe(s, times.front());
    } else {
      const double dt0 = std::min(1e-3, 0.1 * (times[1] - times[0]));
      ode::integrate_times(ode::make_controlled(tolerance, tolerance, ode::runge_kutta_dopri5<State>()), rhs, s,
                           times.begin(), times.end(), dt0, observe, ode::max_step_checker(1000000));
    }
  } catch (const std::exception& e) {
    throw NumericError("semiclassical_trajectory: integration failed at tau = " + std::to_string(reached) + " (" +
                       e.what() + ")");
  }
  return out;
}

double semiclassical_period(double r) {
  check_ratio(r);
  if (r == 1.0) return std::numeric_limits<double>::infinity();
  if (r < 1.0)
    return integrate([r](double u) { const double s = r * std::sin(u); return 1.0 / std::sqrt(1.0 - s * s); }, 0.0,
                     kHalfPi, "semiclassical_period");
  return integrate([r](double th) { const double s = std::sin(th) / r; return 1.0 / std::sqrt(1.0 - s * s); }, 0.0,
                   kHalfPi, "semiclassical_period") /
         r;
}

double semiclassical_time_average(double r, int periods) {
  if (periods < 1) throw ConfigError("semiclassical_time_average: periods must be >= 1");
  const double T = periods * semiclassical_period(r);
  if (!std::isfinite(T)) throw ConfigError("semiclassical_time_average: the period diverges at r = 1");
  const auto traj = semiclassical_trajectory(r, {0.0, T});
  return traj.c2_integral.back() / T;
}

double c2_infinite_time_average(double r, std::optional<double> cutoff) {
  check_ratio(r);
  if (cutoff && !(*cutoff > 0.0 && *cutoff < kHalfPi)) throw ConfigError("collective: cutoff must lie in (0, pi/2)");
  if (r == 0.0) return 1.0;
  const double theta_max = cutoff ? kHalfPi - *cutoff : kHalfPi;

  if (r < 1.0) {
    // sin theta = r sin u removes the inverse square root at the turning point
    const double s = std::sin(theta_max) / r;
    const double u_max = s >= 1.0 ? kHalfPi : std::asin(s);
    const double num = integrate([r](double u) { const double v = r * std::sin(u); return std::sqrt(1.0 - v * v); },
                                 0.0, u_max, "c2_infinite_time_average");
    const double den = integrate([r](double u) { const double v = r * std::sin(u); return 1.0 / std::sqrt(1.0 - v * v); },
                                 0.0, u_max, "c2_infinite_time_average");
    return num / den;
  }
  if (r == 1.0 && !cutoff) return 0.0;
  const double num = integrate([r](double th) { const double c = std::cos(th); return c * c / std::sqrt(gap(r, th)); },
                               0.0, theta_max, "c2_infinite_time_average");
  const double den = integrate([r](double th) { return 1.0 / std::sqrt(gap(r, th)); }, 0.0, theta_max,
                               "c2_infinite_time_average");
  return num / den;
}

// ---------------------------------------------------------------------------
// Dicke sector

namespace {

constexpr int kMaxDicke = 10000;

struct DickeSpectrum {
  linalg::SymmetricEigen eig;
  Eigen::VectorXd overlap;  // <n | m = S>
  Eigen::VectorXd x2;       // (2m/N)^2 along the basis
};

DickeSpectrum dicke_spectrum(int n, double r) {
  if (n < 1 || n > kMaxDicke) throw CapacityError("dicke: N must lie in [1, " + std::to_string(kMaxDicke) + "]");
  check_ratio(r);
  const double S = 0.5 * n;
  Eigen::VectorXd diag(n + 1), off(n);
  DickeSpectrum d;
  d.x2.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double two_m = n - 2.0 * k;  // m = S - k
    diag[k] = two_m * two_m / n;
    d.x2[k] = (two_m / n) * (two_m / n);
    if (k < n) {
      const double m = S - k;
      off[k] = r * std::sqrt(std::max(S * (S + 1.0) - m * (m - 1.0), 0.0));
    }
  }
  d.eig = linalg::tridiagonal_eigen(diag, off);
  d.overlap = d.eig.vectors.row(0).transpose();
  return d;
}

double diagonal_ensemble(const DickeSpectrum& d) {
  const auto& E = d.eig.values;
  const Eigen::Index dim = E.size();
  const double delta = 1e-9 * std::max(1.0, E.cwiseAbs().maxCoeff());
  double total = 0.0;
  Eigen::Index start = 0;
  while (start < dim) {
    Eigen::Index end = start + 1;
    while (end < dim && E[end] - E[end - 1] < delta) ++end;
    // projection of the initial state onto the (near-)degenerate eigenspace
    Eigen::VectorXd v = d.eig.vectors.middleCols(start, end - start) * d.overlap.segment(start, end - start);
    total += (d.x2.array() * v.array().square()).sum();
    start = end;
  }
  return total;
}

}  // namespace

DickeResult dicke_exact(int n, double r, const std::vector<double>& tau_grid) {
  const auto d = dicke_spectrum(n, r);
  DickeResult out;
  out.n = n;
  out.r = r;
  out.tau = tau_grid;
  const auto& V = d.eig.vectors;
  const Eigen::Index dim = V.rows();
  Eigen::VectorXd a(dim), b(dim);
  for (double tau : tau_grid) {
    if (tau < 0.0) throw ConfigError("dicke_exact: times must be non-negative");
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double ph = d.eig.values[k] * tau;
      a[k] = d.overlap[k] * std::cos(ph);
      b[k] = -d.overlap[k] * std::sin(ph);
    }
    const Eigen::VectorXd re = V * a;
    const Eigen::VectorXd im = V * b;
    out.c2.push_back((d.x2.array() * (re.array().square() + im.array().square())).sum());
  }
  if (!tau_grid.empty()) out.c2_grid_average = cumulative_average(out.c2, out.tau).back();
  out.c2_long_time = diagonal_ensemble(d);
  return out;
}

double dicke_long_time_average(int n, double r) { return diagonal_ensemble(dicke_spectrum(n, r)); }

std::vector<DipPoint> dip_scan(std::optional<int> n, const std::vector<double>& r_grid, std::optional<double> cutoff) {
  for (std::size_t k = 1; k < r_grid.size(); ++k)
    if (!(r_grid[k] > r_grid[k - 1])) throw ConfigError("dip_scan: r grid must be ascending");
  std::vector<DipPoint> out(r_grid.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(r_grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long p = 0; p < count; ++p) {
    try {
      const auto k = static_cast<std::size_t>(p);
      out[k].r = r_grid[k];
      out[k].c2 = n ? dicke_long_time_average(*n, r_grid[k]) : c2_infinite_time_average(r_grid[k], cutoff);
    } catch (...) {
#pragma omp critical(dpt_dip_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::optional<std::size_t> interior_minimum(const std::vector<double>& values) {
  if (values.size() < 3) return std::nullopt;
  const auto it = std::min_element(values.begin(), values.end());
  const auto k = static_cast<std::size_t>(it - values.begin());
  if (k == 0 || k + 1 == values.size()) return std::nullopt;
  return k;
}

bool has_interior_local_minimum(const std::vector<double>& values, double tol) {
  for (std::size_t k = 1; k + 1 < values.size(); ++k)
    if (values[k] < values[k - 1] - tol && values[k] < values[k + 1] - tol) return true;
  return false;
}

}  // namespace dpt
