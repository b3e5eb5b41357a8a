#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>

#include "dpt/collective.hpp"
#include "dpt/config.hpp"
#include "dpt/couplings.hpp"
#include "dpt/errors.hpp"
#include "dpt/evolution.hpp"
#include "dpt/observables.hpp"

using namespace dpt;

namespace {

double K(double k) { return boost::math::ellint_1(k); }
double E(double k) { return boost::math::ellint_2(k); }

// Closed forms of the infinite-time average for N -> inf.
double c2_closed_form(double r) {
  if (r < 1.0) return E(r) / K(r);
  return 1.0 - r * r * (1.0 - E(1.0 / r) / K(1.0 / r));
}

double c2_closed_form_critical(double eps) {
  return std::cos(eps) / std::log((1.0 + std::cos(eps)) / std::sin(eps));
}

}  // namespace

TEST_CASE("semiclassics: r = 0 is a fixed point") {
  const auto tr = semiclassical_trajectory(0.0, default_time_grid(11, 5.0));
  for (std::size_t k = 0; k < tr.tau.size(); ++k) {
    CHECK(tr.theta[k] == doctest::Approx(0.0));
    CHECK(tr.magnetization[k] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("semiclassics: turning point at xi = asin r") {
  const double r = 0.5;
  const double t_turn = 0.5 * K(r);
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(2.0 * t_turn * k / 40.0);  // includes t_turn
  const auto tr = semiclassical_trajectory(r, grid);
  double smax = 0.0;
  for (double th : tr.theta) smax = std::max(smax, std::sin(th));
  CHECK(std::abs(smax - r) < 1e-6);
  CHECK(std::abs(std::sin(tr.theta[20]) - r) < 1e-6);
}

TEST_CASE("semiclassics: conserved quantity and cos phi = sin theta / r") {
  for (double r : {0.3, 0.9, 1.4, 3.0}) {
    CAPTURE(r);
    const auto tr = semiclassical_trajectory(r, default_time_grid(201, 20.0));
    for (std::size_t k = 0; k < tr.tau.size(); ++k) {
      CHECK(std::abs(tr.x[k] * tr.x[k] + r * tr.z[k] - 1.0) < 1e-8);
      CHECK(std::abs(tr.x[k] * tr.x[k] + tr.y[k] * tr.y[k] + tr.z[k] * tr.z[k] - 1.0) < 1e-8);
      const double s = std::sqrt(1.0 - tr.x[k] * tr.x[k]);
      if (s > 0.1) CHECK(std::abs(tr.z[k] / s - s / r) < 1e-8);
    }
  }
}

TEST_CASE("semiclassics: symmetry broken below r = 1, restored above") {
  const auto low = semiclassical_trajectory(0.7, default_time_grid(301, 30.0));
  for (double x : low.x) CHECK(x >= std::cos(std::asin(0.7)) - 1e-8);
  const auto high = semiclassical_trajectory(1.5, default_time_grid(301, 30.0));
  CHECK(*std::min_element(high.x.begin(), high.x.end()) < -0.95);
  for (std::size_t k = 1; k < high.theta.size(); ++k) CHECK(high.theta[k] > high.theta[k - 1]);
}

TEST_CASE("semiclassics: period of cos^2 theta") {
  const double r = 2.0;
  const auto f = [r](double th) { return 1.0 / (2.0 * std::sqrt(r * r - std::sin(th) * std::sin(th))); };
  const double direct = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, M_PI);
  CHECK(std::abs(semiclassical_period(r) - direct) < 1e-6);
  CHECK(semiclassical_period(0.5) == doctest::Approx(K(0.5)).epsilon(1e-12));
  CHECK(std::isinf(semiclassical_period(1.0)));

  const double T = semiclassical_period(r);
  const auto tr = semiclassical_trajectory(r, {0.3, 0.3 + T, 0.3 + 3 * T});
  CHECK(std::abs(tr.c2[1] - tr.c2[0]) < 1e-8);
  CHECK(std::abs(tr.c2[2] - tr.c2[0]) < 1e-8);
}

TEST_CASE("infinite-time average: limits and closed forms") {
  CHECK(c2_infinite_time_average(0.0) == 1.0);
  CHECK(std::abs(c2_infinite_time_average(10.0) - 0.5) < 0.01);
  CHECK(c2_infinite_time_average(1.0) == 0.0);
  for (double r : {0.05, 0.3, 0.7, 0.95, 0.999, 1.001, 1.05, 1.5, 3.0, 10.0}) {
    CAPTURE(r);
    const double v = c2_infinite_time_average(r);
    CHECK(std::abs(v - c2_closed_form(r)) < 1e-10);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(c2_infinite_time_average(-0.1), ConfigError);
  CHECK_THROWS_AS(c2_infinite_time_average(1.0, 2.0), ConfigError);
}

TEST_CASE("infinite-time average at r = 1 with an uncertainty cutoff") {
  std::vector<double> scaled;
  for (double eps : {0.1, 0.01, 0.001}) {
    const double v = c2_infinite_time_average(1.0, eps);
    CHECK(std::abs(v - c2_closed_form_critical(eps)) < 1e-10);
    scaled.push_back(v * std::log(1.0 / eps));
  }
  const double mean = (scaled[0] + scaled[1] + scaled[2]) / 3.0;
  MESSAGE("C2 log(1/eps): " << scaled[0] << ", " << scaled[1] << ", " << scaled[2]);
  for (double s : scaled) CHECK(std::abs(s / mean - 1.0) < 0.15);
  // the cutoff only bites when it is tighter than the turning point
  CHECK(c2_infinite_time_average(0.5, 0.01) == doctest::Approx(c2_infinite_time_average(0.5)).epsilon(1e-12));
}

TEST_CASE("50-period time average matches the quadrature") {
  for (double r : {0.3, 0.7, 2.0}) {
    CAPTURE(r);
    CHECK(std::abs(semiclassical_time_average(r, 50) - c2_infinite_time_average(r)) < 1e-3);
  }
}

TEST_CASE("Dicke sector: r = 0 is stationary") {
  const auto d = dicke_exact(40, 0.0, default_time_grid(11, 6.0));
  for (double c : d.c2) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.c2_long_time == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Dicke sector matches full diagonalization of the uniform chain") {
  for (int n : {2, 5, 8}) {
    for (double r : {0.4, 1.0, 1.7}) {
      CAPTURE(n);
      CAPTURE(r);
      const auto spec = HamiltonianSpec::from_ratio(power_law_couplings(n, 380.0, 0.0), r);
      const auto grid = default_time_grid(13, 3.0);
      QuenchOptions o;
      o.evolve.method = Method::ExactDiag;
      const auto full = quench_run(spec, grid, o);
      std::vector<double> collective_grid;
      for (double t : grid) collective_grid.push_back(0.5 * n * t);
      const auto d = dicke_exact(n, r, collective_grid);
      for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(full.c2[k] - d.c2[k]) < 1e-9);
    }
  }
}

TEST_CASE("Dicke sector approaches the semiclassical limit") {
  const double r = 0.5;
  const auto grid = default_time_grid(31, 3.0);
  const auto d = dicke_exact(2048, r, grid);
  const auto tr = semiclassical_trajectory(r, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) worst = std::max(worst, std::abs(d.c2[k] - tr.c2[k]));
  MESSAGE("max |C2_Dicke - cos^2 theta| = " << worst);
  CHECK(worst < 0.02);
}

TEST_CASE("Dicke dip at r = 1 drops logarithmically") {
  std::vector<double> dip, scaled;
  for (int n : {16, 64, 256, 1024}) {
    dip.push_back(dicke_long_time_average(n, 1.0));
    scaled.push_back(dip.back() * std::log(static_cast<double>(n)));
  }
  for (std::size_t k = 1; k < dip.size(); ++k) CHECK(dip[k] < dip[k - 1]);
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  MESSAGE("dip log N: " << scaled[0] << ", " << scaled[1] << ", " << scaled[2] << ", " << scaled[3]);
  CHECK(*hi / *lo < 2.0);
}

TEST_CASE("Dicke long-time average agrees with the grid path") {
  const auto d = dicke_exact(30, 0.8, {});
  CHECK(d.c2_long_time == doctest::Approx(dicke_long_time_average(30, 0.8)).epsilon(1e-14));
  CHECK_THROWS_AS(dicke_long_time_average(10001, 1.0), CapacityError);
  CHECK_THROWS_AS(dicke_exact(10, 1.0, {-1.0}), ConfigError);
}

TEST_CASE("dip scan for N = inf") {
  const auto scan = dip_scan(std::nullopt, {0.5, 0.9, 1.0, 1.1, 2.0});
  std::vector<double> c2;
  for (const auto& p : scan) c2.push_back(p.c2);
  const auto k = interior_minimum(c2);
  REQUIRE(k.has_value());
  CHECK(scan[*k].r == 1.0);
  CHECK(c2[0] > c2[4]);
  CHECK(c2[4] > 0.45);

  const auto fine = dip_scan(std::nullopt, arithmetic_grid(0.0, 2.0, 0.05));
  std::vector<double> fc2;
  for (const auto& p : fine) fc2.push_back(p.c2);
  const auto kf = interior_minimum(fc2);
  REQUIRE(kf.has_value());
  CHECK(std::abs(fine[*kf].r - 1.0) < 1e-12);

  const auto one = dip_scan(std::nullopt, {0.7});
  CHECK(one.size() == 1);
  CHECK_FALSE(interior_minimum({one[0].c2}).has_value());
  CHECK_THROWS_AS(dip_scan(std::nullopt, {1.0, 0.5}), ConfigError);
}

TEST_CASE("finite-N dip scans are smooth versions of the N = inf curve") {
  const auto grid = arithmetic_grid(0.5, 1.5, 0.1);
  std::vector<double> c2;
  for (const auto& p : dip_scan(256, grid)) c2.push_back(p.c2);
  const auto k = interior_minimum(c2);
  REQUIRE(k.has_value());
  CHECK(std::abs(grid[*k] - 1.0) < 0.15);
  CHECK(has_interior_local_minimum(c2));
  CHECK_FALSE(has_interior_local_minimum({1.0, 0.8, 0.6, 0.5}));
}
