#include <doctest.h>

#include <cmath>
#include <random>

#include "dpt/couplings.hpp"
#include "dpt/errors.hpp"
#include "dpt/evolution.hpp"
#include "dpt/hamiltonian.hpp"
#include "dpt/ionchain.hpp"
#include "dpt/observables.hpp"
#include "oracles.hpp"

using namespace dpt;

namespace {

ChainGeometry chain(int n, double nu_z = 400e3) {
  TrapConfig t;
  t.n_ions = n;
  t.nu_axial = nu_z;
  return solve_chain(t);
}

LaserConfig laser(double rabi, double detuning = 82e3) {
  LaserConfig l;
  l.rabi_freq = rabi;
  l.detuning_from_com = detuning;
  return l;
}

}  // namespace

TEST_CASE("couplings scale with the square of the Rabi frequency") {
  const auto g = chain(8);
  const auto a = ising_couplings(g, laser(1e5));
  const auto b = ising_couplings(g, laser(2e5));
  CHECK((b.J - 4.0 * a.J).cwiseAbs().maxCoeff() <= 1e-12 * a.J.cwiseAbs().maxCoeff());
  CHECK(b.J0 == doctest::Approx(4.0 * a.J0).epsilon(1e-12));
  CHECK(b.kac == doctest::Approx(a.kac).epsilon(1e-12));
}

TEST_CASE("coupling matrix is symmetric with zero diagonal") {
  const auto c = ising_couplings(chain(10), laser(3e5));
  CHECK((c.J - c.J.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.J.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.kac > 0.0);
}

TEST_CASE("beatnote above every mode gives one-signed couplings") {
  for (double delta : {20e3, 82e3, 300e3}) {
    const auto c = ising_couplings(chain(12), laser(1e5, delta));
    int pos = 0, neg = 0;
    for (int i = 0; i < 12; ++i)
      for (int j = i + 1; j < 12; ++j) (c.J(i, j) > 0 ? pos : neg)++;
    CHECK(pos * neg == 0);
  }
}

TEST_CASE("coupling_sign flips the whole matrix") {
  auto l = laser(1e5);
  const auto plus = ising_couplings(chain(6), l);
  l.coupling_sign = -1;
  const auto minus = ising_couplings(chain(6), l);
  CHECK((plus.J + minus.J).cwiseAbs().maxCoeff() == 0.0);
  CHECK(plus.J(2, 3) > 0.0);
}

TEST_CASE("resonant beatnote names the offending mode") {
  const auto g = chain(5);
  // beatnote placed on the second mode
  auto l = laser(1e5, g.mode_freqs[1] - g.mode_freqs[0] + 200.0);
  try {
    (void)ising_couplings(g, l);
    FAIL("expected a resonance error");
  } catch (const ResonanceError& e) {
    CHECK(e.mode() == 1);
  }
}

TEST_CASE("power-law fit recovers exact models") {
  const auto exact = power_law_couplings(9, 2.0, 1.0);
  const auto fit = fit_power_law(exact);
  CHECK(std::abs(fit.J0 - 2.0) < 1e-12);
  CHECK(std::abs(fit.alpha - 1.0) < 1e-12);
  CHECK(fit.excluded == 0);

  const auto uniform = power_law_couplings(7, 0.5, 0.0);
  CHECK(std::abs(fit_power_law(uniform).alpha) < 1e-12);
}

TEST_CASE("power-law fit tolerates 1% multiplicative noise") {
  auto c = power_law_couplings(16, 1.0, 1.3);
  std::mt19937_64 g(7);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) c.J(i, j) = c.J(j, i) = c.J(i, j) * (1.0 + noise(g));
  CHECK(std::abs(fit_power_law(c).alpha - 1.3) < 0.05);
}

TEST_CASE("zero couplings are left out of the fit and counted") {
  auto c = power_law_couplings(6, 1.0, 0.7);
  c.J(0, 5) = c.J(5, 0) = 0.0;
  const auto fit = fit_power_law(c);
  CHECK(fit.excluded == 1);
  CHECK(std::abs(fit.alpha - 0.7) < 1e-12);
  CHECK_THROWS_AS(fit_power_law(power_law_couplings(2, 1.0, 1.0)), ConfigError);
}

TEST_CASE("Kac constant") {
  for (int n : {2, 5, 16}) CHECK(kac_norm(power_law_couplings(n, 0.38, 0.0)) == doctest::Approx(n - 1).epsilon(1e-14));
  CHECK(power_law_couplings(2, 1.0, 0.8).kac == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(power_law_couplings(3, 1.0, 1.0).kac == doctest::Approx(5.0 / 3.0).epsilon(1e-14));

  const auto c = power_law_couplings(8, 1.0, 1.1);
  CHECK(kac_norm(3.7 * c.J, 3.7 * c.J0) == doctest::Approx(c.kac).epsilon(1e-14));
}

TEST_CASE("nearest-neighbour limit") {
  const auto c = power_law_couplings(6, 1.0, std::numeric_limits<double>::infinity());
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(c.J(i, j) == (std::abs(i - j) == 1 ? 1.0 : 0.0));
  CHECK(c.kac == doctest::Approx(10.0 / 6.0));
}

TEST_CASE("Rabi calibration inverts the quadratic scaling") {
  const auto g = chain(8);
  const double omega0 = 1.5e5;
  const double j0 = ising_couplings(g, laser(omega0)).J0;
  CHECK(calibrate_rabi(g, laser(1.0), 4.0 * j0) == doctest::Approx(2.0 * omega0).epsilon(1e-12));
  CHECK_THROWS_AS(calibrate_rabi(g, laser(1.0), 0.0), ConfigError);
}

TEST_CASE("sixteen ions calibrated to 0.38 kHz round-trip") {
  const auto g = chain(16);
  const double omega = calibrate_rabi(g, laser(1.0), 380.0);
  const auto c = ising_couplings(g, laser(omega));
  CHECK(std::abs(c.J0 / 380.0 - 1.0) < 1e-9);
}

TEST_CASE("fitted power law reproduces the central nearest-neighbour couplings") {
  // experimental chain lengths with their detunings
  const std::vector<std::pair<int, double>> configs = {{8, 56e3}, {12, 69e3}, {16, 82e3}};
  for (const auto& [n, delta] : configs) {
    CAPTURE(n);
    const auto g = chain(n);
    const auto c = ising_couplings(g, laser(calibrate_rabi(g, laser(1.0, delta), 380.0), delta));
    const auto fit = fit_power_law(c);
    const int lo = n / 3, hi = n - n / 3;
    for (int i = lo; i + 1 < hi; ++i) CHECK(std::abs(fit.J0 / c.J(i, i + 1) - 1.0) < 0.15);
  }
}

TEST_CASE("field mapping: renormalized field scales with the Kac constant") {
  const auto c = power_law_couplings(10, 0.38e3, 0.0);
  // alpha = 0: B~z = J0 r maps to r J0 N / 2 on every site
  CHECK(field_for_ratio(c, 1.0) == doctest::Approx(0.38e3 * 5.0).epsilon(1e-14));
  CHECK(ratio_for_field(c, field_for_ratio(c, 0.7)) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("joint rescaling of J and Bz only rescales time") {
  const int n = 6;
  CouplingMatrix c;
  c.J = oracle::random_couplings(n, 11, 300.0);
  c.J0 = 300.0;
  HamiltonianSpec a;
  a.couplings = c;
  a.bz = 250.0;
  a.gradient = 40.0;

  const double scale = 3.5;
  HamiltonianSpec b = a;
  b.couplings.J *= scale;
  b.couplings.J0 *= scale;
  b.bz *= scale;
  b.gradient *= scale;

  EvolveOptions ed;
  ed.method = Method::ExactDiag;
  const auto psi0 = prepare_polarized(n, Polarization::MinusX);
  for (double t : {0.3e-3, 1.1e-3, 2.9e-3}) {
    const auto sa = evolve(a, psi0, t, ed);
    const auto sb = evolve(b, psi0, t / scale, ed);
    CHECK(std::abs(magnetization(sa).average - magnetization(sb).average) < 1e-10);
    CHECK(std::abs(two_spin_c2(sa) - two_spin_c2(sb)) < 1e-10);
  }
}
