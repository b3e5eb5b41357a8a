// Serial reference kernels against their OpenMP versions.
//
//   dpt_bench [--n-min 14] [--n-max 20] [--repeats 5]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include <omp.h>

#include <CLI11.hpp>

#include "dpt/couplings.hpp"
#include "dpt/kernels.hpp"

using namespace dpt;

namespace {

double seconds(const std::function<void()>& f, int repeats) {
  f();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
}

void row(const char* name, int n, double ts, double tp, double diff) {
  std::printf("%-18s %3d %12.3e %12.3e %8.2f %10.1e\n", name, n, ts, tp, ts / tp, diff);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP state-vector kernels"};
  int n_min = 14, n_max = 20, repeats = 5;
  app.add_option("--n-min", n_min)->check(CLI::Range(2, 28));
  app.add_option("--n-max", n_max)->check(CLI::Range(2, 28));
  app.add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-18s %3s %12s %12s %8s %10s\n", "kernel", "N", "serial [s]", "omp [s]", "speedup", "max diff");

  for (int n = n_min; n <= n_max; n += 2) {
    const auto c = power_law_couplings(n, 1.0, 0.8);
    const std::vector<double> fields(static_cast<std::size_t>(n), 0.7);
    const auto terms = kernels::IsingTerms::build(c.J, fields);
    const std::size_t dim = std::size_t{1} << n;
    std::mt19937_64 g(n);
    std::normal_distribution<double> d;
    std::vector<cplx> psi(dim), a(dim), b(dim);
    for (auto& v : psi) v = {d(g), d(g)};
    const double inv = 1.0 / std::sqrt(kernels::serial::norm_squared(psi));
    for (auto& v : psi) v *= inv;

    const double ts = seconds([&] { kernels::serial::apply_ising(terms, psi, a); }, repeats);
    const double tp = seconds([&] { kernels::omp::apply_ising(terms, psi, b); }, repeats);
    double diff = 0.0;
    for (std::size_t k = 0; k < dim; ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
    row("apply_ising", n, ts, tp, diff);

    cplx ds, dp;
    const double td_s = seconds([&] { ds = kernels::serial::dot(psi, a); }, repeats);
    const double td_p = seconds([&] { dp = kernels::omp::dot(psi, a); }, repeats);
    // <psi|H psi> is near zero for a random state, so scale by |H psi|
    row("dot", n, td_s, td_p, std::abs(ds - dp) / std::sqrt(kernels::serial::norm_squared(a)));

    std::vector<double> ms, mp;
    const double t1 = seconds([&] { ms = kernels::serial::site_sigma_x(psi, n); }, repeats);
    const double t2 = seconds([&] { mp = kernels::omp::site_sigma_x(psi, n); }, repeats);
    diff = 0.0;
    for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(ms[i] - mp[i]));
    row("site_sigma_x", n, t1, t2, diff);

    double cs = 0, cp = 0;
    const double tc_s = seconds([&] { cs = kernels::serial::pair_sigma_x_sum(psi, n); }, repeats);
    const double tc_p = seconds([&] { cp = kernels::omp::pair_sigma_x_sum(psi, n); }, repeats);
    row("pair_sigma_x_sum", n, tc_s, tc_p, std::abs(cs - cp) / std::abs(cs));
  }
  return 0;
}
