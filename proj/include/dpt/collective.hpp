#pragma once

// Collective-spin (alpha = 0) theory for H0 = (J0/N) (Sx)^2 + B~z Sz, with
// Sx, Sz sums of Pauli matrices and r = B~z / J0. Times are tau = 2 pi J0 t
// measured with H0 itself.

#include <optional>
#include <vector>

namespace dpt {

struct SemiclassicalTrajectory {
  std::vector<double> tau;
  std::vector<double> x, y, z;        // Bloch vector, x(0) = 1
  std::vector<double> theta;          // polar angle from +x; unwrapped winding angle for r > 1
  std::vector<double> magnetization;  // cos theta = x
  std::vector<double> c2;             // cos^2 theta
  std::vector<double> c2_integral;    // int_0^tau cos^2 theta
};

/// Mean-field equations x' = -2 r y, y' = 2 r x - 4 x z, z' = 4 x y from the +x
/// pole, integrated with an adaptive Dormand-Prince 5(4) pair at 1e-10.
/// They conserve x^2 + r z = 1, i.e. cos phi = sin(theta) / r.
/// Throws NumericError naming the time reached when the integrator fails.
SemiclassicalTrajectory semiclassical_trajectory(double r, const std::vector<double>& tau_grid, double tolerance = 1e-10);

/// Period of cos^2 theta: K(r) for r < 1, K(1/r)/r for r > 1 (by quadrature);
/// +inf at r = 1.
double semiclassical_period(double r);

/// (1/T) int_0^T cos^2 theta over `periods` periods of the ODE solution.
double semiclassical_time_average(double r, int periods = 50);

/// Infinite-time average of C2 for N -> inf:
///   int_0^xi cos^2 theta dtheta / sqrt(r^2 - sin^2 theta)  /  int_0^xi dtheta / sqrt(r^2 - sin^2 theta),
/// xi = asin(min(r, 1)). With a cutoff the upper limit is min(xi, pi/2 - cutoff).
/// r = 1 without a cutoff returns the limit 0 (the denominator diverges).
/// Throws NumericError when the quadrature misses its tolerance.
double c2_infinite_time_average(double r, std::optional<double> cutoff = std::nullopt);

struct DickeResult {
  int n = 0;
  double r = 0.0;
  std::vector<double> tau;
  std::vector<double> c2;          // <(Sx/N)^2>(tau)
  double c2_grid_average = 0.0;    // cumulative average over the grid
  double c2_long_time = 0.0;       // diagonal-ensemble (infinite-time) average
};

/// Exact dynamics in the (N+1)-dimensional maximal-spin sector from the fully
/// x-polarized state. Built in the Sx eigenbasis, where H0/J0 is tridiagonal:
/// diagonal (2m)^2 / N, off-diagonal r sqrt(S(S+1) - m(m-1)).
DickeResult dicke_exact(int n, double r, const std::vector<double>& tau_grid);

/// Infinite-time average only (skips the time grid).
double dicke_long_time_average(int n, double r);

struct DipPoint {
  double r = 0.0;
  double c2 = 0.0;
};

/// Long-time C2 per r: semiclassical quadrature for n = nullopt (N = inf, optional
/// cutoff), Dicke-sector diagonal ensemble for finite n. Points run in parallel.
std::vector<DipPoint> dip_scan(std::optional<int> n, const std::vector<double>& r_grid,
                               std::optional<double> cutoff = std::nullopt);

/// Index of the smallest value when it lies strictly inside the sequence.
std::optional<std::size_t> interior_minimum(const std::vector<double>& values);

/// True when some interior point is strictly below both neighbours by more than `tol`.
bool has_interior_local_minimum(const std::vector<double>& values, double tol = 0.0);

}  // namespace dpt
