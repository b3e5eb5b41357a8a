#include "dpt/observables.hpp"

#include <cmath>
#include <exception>
#include <numbers>

#include "dpt/control.hpp"
#include "dpt/errors.hpp"
#include "dpt/kernels.hpp"

namespace dpt {

Magnetization magnetization(const SpinState& state) {
  Magnetization m;
  m.sites = kernels::omp::site_sigma_x(state.amplitudes(), state.n_qubits());
  double sum = 0.0;
  for (double s : m.sites) sum += s;
  m.average = m.sites.empty() ? 0.0 : sum / static_cast<double>(m.sites.size());
  return m;
}

double two_spin_c2(const SpinState& state) {
  const double n = state.n_qubits();
  return kernels::omp::pair_sigma_x_sum(state.amplitudes(), state.n_qubits()) / (n * n);
}

double collective_c2(const SpinState& state) {
  std::vector<cplx> sx(state.dim());
  kernels::omp::apply_collective_x(state.amplitudes(), sx, state.n_qubits());
  const double n = state.n_qubits();
  return kernels::omp::norm_squared(sx) / (n * n);
}

std::vector<double> cumulative_average(const std::vector<double>& series, const std::vector<double>& grid) {
  if (series.size() != grid.size()) throw ConfigError("cumulative_average: series and grid lengths differ");
  std::vector<double> out(series.size());
  if (series.empty()) return out;
  out[0] = series[0];
  double integral = 0.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double dt = grid[k] - grid[k - 1];
    if (!(dt > 0.0)) throw ConfigError("cumulative_average: grid must be strictly ascending");
    integral += 0.5 * dt * (series[k] + series[k - 1]);
    out[k] = integral / (grid[k] - grid[0]);
  }
  return out;
}

Window parse_window(const std::string& name) {
  if (name == "cumulative") return Window::Cumulative;
  if (name == "grid_mean") return Window::GridMean;
  throw ConfigError("unknown window '" + name + "' (expected cumulative or grid_mean)");
}

std::string to_string(Window w) { return w == Window::Cumulative ? "cumulative" : "grid_mean"; }

double time_average(const std::vector<double>& series, const std::vector<double>& grid, Window window) {
  if (series.empty()) throw ConfigError("time_average: empty series");
  if (window == Window::Cumulative) return cumulative_average(series, grid).back();
  double sum = 0.0;
  for (double v : series) sum += v;
  return sum / static_cast<double>(series.size());
}

std::vector<double> default_time_grid(int points, double tau_max) {
  if (points < 1) throw ConfigError("time grid needs at least one point");
  if (points == 1) return {0.0};
  if (!(tau_max > 0.0)) throw ConfigError("time grid: tau_max must be positive");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = tau_max * k / (points - 1);
  return grid;
}

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("quench: empty time grid");
  if (grid.front() < 0.0) throw ConfigError("quench: time grid must start at or after 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ConfigError("quench: time grid must be strictly ascending");
}

double seconds_per_tau(const HamiltonianSpec& spec) {
  if (!(spec.couplings.J0 > 0.0)) throw ConfigError("quench: J0 must be positive to convert 2 pi J0 t");
  return 1.0 / (2.0 * std::numbers::pi * spec.couplings.J0);
}

template <class Visit>
void walk(const HamiltonianSpec& spec, const std::vector<double>& tau_grid, const QuenchOptions& options, Visit visit) {
  check_grid(tau_grid);
  const double scale = seconds_per_tau(spec);
  const Propagator propagator(spec, options.evolve);
  SpinState psi = options.initial ? *options.initial : prepare_polarized(spec.n(), Polarization::MinusX);
  if (psi.n_qubits() != spec.n()) throw ConfigError("quench: initial state has the wrong qubit count");
  double t_prev = 0.0;
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    const double t = tau_grid[k] * scale;
    if (t > t_prev) propagator.evolve(psi, t - t_prev);
    t_prev = t;
    visit(k, psi);
  }
}

}  // namespace

QuenchResult quench_run(const HamiltonianSpec& spec, const std::vector<double>& tau_grid, const QuenchOptions& options) {
  QuenchResult r;
  const std::size_t steps = tau_grid.size();
  const int n = spec.n();
  r.tau = tau_grid;
  r.site_mag.resize(static_cast<Eigen::Index>(steps), n);
  const auto terms = spec.terms();
  std::vector<cplx> h_psi;
  walk(spec, tau_grid, options, [&](std::size_t k, const SpinState& psi) {
    const auto m = magnetization(psi);
    for (int i = 0; i < n; ++i) r.site_mag(static_cast<Eigen::Index>(k), i) = m.sites[static_cast<std::size_t>(i)];
    r.mag.push_back(m.average);
    r.c2.push_back(two_spin_c2(psi));
    r.norm.push_back(psi.norm());
    h_psi.resize(psi.dim());
    kernels::omp::apply_ising(terms, psi.amplitudes(), h_psi);
    r.energy.push_back(kernels::omp::dot(psi.amplitudes(), h_psi).real());
    if (k + 1 == steps) r.final_state = psi;
  });
  const double scale = seconds_per_tau(spec);
  for (double tau : tau_grid) r.seconds.push_back(tau * scale);
  r.mag_cumavg = cumulative_average(r.mag, r.tau);
  r.c2_cumavg = cumulative_average(r.c2, r.tau);
  return r;
}

std::vector<SpinState> quench_states(const HamiltonianSpec& spec, const std::vector<double>& tau_grid,
                                     const QuenchOptions& options) {
  std::vector<SpinState> out;
  out.reserve(tau_grid.size());
  walk(spec, tau_grid, options, [&](std::size_t, const SpinState& psi) { out.push_back(psi); });
  return out;
}

std::vector<ScanPoint> field_scan(const CouplingMatrix& couplings, const std::vector<double>& ratios,
                                  const std::vector<double>& tau_grid, const ScanOptions& options) {
  std::vector<ScanPoint> out(ratios.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(ratios.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long p = 0; p < count; ++p) {
    try {
      const auto k = static_cast<std::size_t>(p);
      const auto spec = HamiltonianSpec::from_ratio(couplings, ratios[k], options.gradient);
      QuenchOptions q;
      q.evolve = options.evolve;
      const auto run = quench_run(spec, tau_grid, q);
      out[k].ratio = ratios[k];
      out[k].c2_timeavg = time_average(run.c2, run.tau, options.window);
      out[k].mag_timeavg_abs = std::abs(time_average(run.mag, run.tau, options.window));
    } catch (...) {
#pragma omp critical(dpt_scan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace dpt
