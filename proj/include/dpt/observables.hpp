#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpt/evolution.hpp"
#include "dpt/hamiltonian.hpp"
#include "dpt/spin_state.hpp"

namespace dpt {

struct Magnetization {
  std::vector<double> sites;  // <sx_i>
  double average = 0.0;
};

Magnetization magnetization(const SpinState& state);

/// C2 = sum_{i,j} <sx_i sx_j> / N^2, diagonal included.
double two_spin_c2(const SpinState& state);

/// Same quantity through || Sx psi ||^2 / N^2 (independent evaluation path).
double collective_c2(const SpinState& state);

/// (1/t) int_0^t f, trapezoid rule; output[0] = series[0].
std::vector<double> cumulative_average(const std::vector<double>& series, const std::vector<double>& grid);

/// How a time series is reduced to a single long-time value.
enum class Window {
  Cumulative,  // cumulative average at the last grid point
  GridMean,    // plain mean over the grid points
};

Window parse_window(const std::string& name);
std::string to_string(Window w);

double time_average(const std::vector<double>& series, const std::vector<double>& grid, Window window);

/// Uniform grid of `points` values of 2 pi J0 t over [0, tau_max].
std::vector<double> default_time_grid(int points = 21, double tau_max = 4.8);

struct QuenchOptions {
  EvolveOptions evolve;
  /// Initial product state; defaults to |down...down>_x.
  std::optional<SpinState> initial;
};

struct QuenchResult {
  std::vector<double> tau;      // 2 pi J0 t
  std::vector<double> seconds;  // t
  Eigen::MatrixXd site_mag;     // row k: <sx_i> at tau[k]
  std::vector<double> mag;
  std::vector<double> c2;
  std::vector<double> mag_cumavg;
  std::vector<double> c2_cumavg;
  std::vector<double> norm;
  std::vector<double> energy;  // <H>, Hz
  SpinState final_state;
};

/// Evolves the initial state along an ascending grid of 2 pi J0 t, carrying the
/// state between grid points, and records the observables at every point.
QuenchResult quench_run(const HamiltonianSpec& spec, const std::vector<double>& tau_grid, const QuenchOptions& options = {});

/// The same walk, returning the state at every grid point.
std::vector<SpinState> quench_states(const HamiltonianSpec& spec, const std::vector<double>& tau_grid,
                                     const QuenchOptions& options = {});

struct ScanPoint {
  double ratio = 0.0;  // B~z / J0
  double c2_timeavg = 0.0;
  double mag_timeavg_abs = 0.0;
};

struct ScanOptions {
  EvolveOptions evolve;
  Window window = Window::Cumulative;
  double gradient = 0.0;
};

/// Time-averaged C2 and |<sx>| after a quench at every field ratio. Points run
/// in parallel; each point is independent and deterministic.
std::vector<ScanPoint> field_scan(const CouplingMatrix& couplings, const std::vector<double>& ratios,
                                  const std::vector<double>& tau_grid, const ScanOptions& options = {});

}  // namespace dpt
