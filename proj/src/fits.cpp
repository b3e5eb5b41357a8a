#include "dpt/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "dpt/errors.hpp"
#include "dpt/random.hpp"

namespace dpt {

// ---------------------------------------------------------------------------
// Breakpoint

namespace {

struct Segments {
  double a = 0, s1 = 0, s2 = 0, rss = 0;
};

Segments segments_at(double c, const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = std::sqrt(w[static_cast<std::size_t>(i)]);
    const double d = x[static_cast<std::size_t>(i)] - c;
    A(i, 0) = sw;
    A(i, 1) = sw * std::min(d, 0.0);
    A(i, 2) = sw * std::max(d, 0.0);
    b[i] = sw * y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d p = A.colPivHouseholderQr().solve(b);
  return {p[0], p[1], p[2], (A * p - b).squaredNorm()};
}

double line_rss(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = std::sqrt(w[static_cast<std::size_t>(i)]);
    A(i, 0) = sw;
    A(i, 1) = sw * x[static_cast<std::size_t>(i)];
    b[i] = sw * y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d p = A.colPivHouseholderQr().solve(b);
  return (A * p - b).squaredNorm();
}

BreakpointFit fit_once(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                       int grid_points) {
  std::vector<double> xs = x;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() < 4) throw FitError("fit_breakpoint: need at least four distinct x values");
  // at least two distinct x on each side of the vertex
  const double lo = xs[1], hi = xs[xs.size() - 2];

  const auto rss = [&](double c) { return segments_at(c, x, y, w).rss; };
  int best = 0;
  double best_rss = std::numeric_limits<double>::infinity();
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  for (int k = 0; k < grid_points; ++k) {
    grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (grid_points - 1);
    const double r = rss(grid[static_cast<std::size_t>(k)]);
    if (r < best_rss) best_rss = r, best = k;
  }

  const double tss_scale = line_rss(x, y, w);
  if (!(tss_scale - best_rss > 1e-12 * (1.0 + tss_scale)))
    throw FitError("fit_breakpoint: a kink does not improve on a single line");

  const double left = grid[static_cast<std::size_t>(std::max(best - 1, 0))];
  const double right = grid[static_cast<std::size_t>(std::min(best + 1, grid_points - 1))];
  const auto [c, r] = boost::math::tools::brent_find_minima(rss, left, right, std::numeric_limits<double>::digits / 2);
  const double pad = 1e-9 * (hi - lo);
  if (c <= lo + pad || c >= hi - pad) throw FitError("fit_breakpoint: no interior minimum");

  const auto s = segments_at(c, x, y, w);
  BreakpointFit fit;
  fit.breakpoint = c;
  fit.value_at_break = s.a;
  fit.slope_left = s.s1;
  fit.slope_right = s.s2;
  fit.rss = r;
  return fit;
}

}  // namespace

BreakpointFit fit_breakpoint(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& weights, const BreakpointOptions& options) {
  if (x.size() != y.size()) throw ConfigError("fit_breakpoint: x and y lengths differ");
  if (!weights.empty() && weights.size() != x.size()) throw ConfigError("fit_breakpoint: weights length differs");
  if (x.size() < 5) throw FitError("fit_breakpoint: need at least five points");
  if (options.grid_points < 3) throw ConfigError("fit_breakpoint: grid_points must be >= 3");
  std::vector<double> w = weights.empty() ? std::vector<double>(x.size(), 1.0) : weights;
  for (double v : w)
    if (!(v > 0.0)) throw ConfigError("fit_breakpoint: weights must be positive");

  BreakpointFit fit = fit_once(x, y, w, options.grid_points);

  // residual bootstrap on the whitened residuals
  const std::size_t n = x.size();
  std::vector<double> model(n), resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - fit.breakpoint;
    model[i] = fit.value_at_break + fit.slope_left * std::min(d, 0.0) + fit.slope_right * std::max(d, 0.0);
    resid[i] = (y[i] - model[i]) * std::sqrt(w[i]);
  }
  std::vector<double> samples;
  std::vector<double> yb(n);
  for (int b = 0; b < options.bootstrap; ++b) {
    auto g = rng::engine(options.seed, static_cast<std::uint64_t>(b));
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(rng::uniform(g) * static_cast<double>(n));
      yb[i] = model[i] + resid[std::min(j, n - 1)] / std::sqrt(w[i]);
    }
    try {
      samples.push_back(fit_once(x, yb, w, options.grid_points).breakpoint);
    } catch (const FitError&) {
    }
  }
  fit.bootstrap_used = static_cast<int>(samples.size());
  if (samples.size() >= 2) {
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    fit.uncertainty = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Lorentzian dip

double LorentzianFit::operator()(double x) const {
  const double u = x - center;
  return background + slope * x - depth * width * width / (u * u + width * width);
}

namespace {

// parameters: a, b, c, d, log w
struct DipFunctor : Eigen::DenseFunctor<double> {
  const std::vector<double>& x;
  const std::vector<double>& y;

  DipFunctor(const std::vector<double>& xs, const std::vector<double>& ys)
      : Eigen::DenseFunctor<double>(5, static_cast<int>(xs.size())), x(xs), y(ys) {}

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    const double w = std::exp(p[4]);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = x[i] - p[2];
      f[static_cast<Eigen::Index>(i)] = p[0] + p[1] * x[i] - p[3] * w * w / (u * u + w * w) - y[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const {
    const double w = std::exp(p[4]);
    const double w2 = w * w;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double u = x[i] - p[2];
      const double q = u * u + w2;
      const double L = w2 / q;
      J(r, 0) = 1.0;
      J(r, 1) = x[i];
      J(r, 2) = -p[3] * 2.0 * w2 * u / (q * q);
      J(r, 3) = -L;
      // dL/dlog w = 2 w^2 u^2 / q^2
      J(r, 4) = -p[3] * 2.0 * w2 * u * u / (q * q);
    }
    return 0;
  }
};

// Best (a, b, d) for fixed (c, w) and its residual.
double project(const std::vector<double>& x, const std::vector<double>& y, double c, double w, Eigen::Vector3d& abd) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = x[static_cast<std::size_t>(i)] - c;
    A(i, 0) = 1.0;
    A(i, 1) = x[static_cast<std::size_t>(i)];
    A(i, 2) = -w * w / (u * u + w * w);
    b[i] = y[static_cast<std::size_t>(i)];
  }
  abd = A.colPivHouseholderQr().solve(b);
  return (A * abd - b).squaredNorm();
}

}  // namespace

LorentzianFit fit_lorentzian_dip(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("fit_lorentzian_dip: x and y lengths differ");
  if (x.size() < 6) throw FitError("fit_lorentzian_dip: need at least six points");
  const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  const double xmin = *xmin_it, xmax = *xmax_it;
  const double span = xmax - xmin;
  if (!(span > 0.0)) throw FitError("fit_lorentzian_dip: x values are all equal");

  std::vector<double> xs = x;
  std::sort(xs.begin(), xs.end());
  double min_gap = span;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[i - 1]) min_gap = std::min(min_gap, xs[i] - xs[i - 1]);

  Eigen::VectorXd p(5);
  double best = std::numeric_limits<double>::infinity();
  const int nc = 201, nw = 60;
  for (int ic = 0; ic < nc; ++ic) {
    const double c = xmin + span * ic / (nc - 1);
    for (int iw = 0; iw < nw; ++iw) {
      const double w = 0.25 * min_gap * std::pow(4.0 * span / (0.25 * min_gap), static_cast<double>(iw) / (nw - 1));
      Eigen::Vector3d abd;
      const double r = project(x, y, c, w, abd);
      if (abd[2] > 0.0 && r < best) {
        best = r;
        p << abd[0], abd[1], c, abd[2], std::log(w);
      }
    }
  }
  if (!std::isfinite(best)) throw FitError("fit_lorentzian_dip: no dip-shaped start found");

  DipFunctor functor(x, y);
  Eigen::LevenbergMarquardt<DipFunctor> lm(functor);
  lm.setMaxfev(2000);
  lm.setXtol(1e-14);
  lm.setFtol(1e-14);
  lm.setGtol(0.0);
  const auto status = lm.minimize(p);
  Eigen::VectorXd f(static_cast<Eigen::Index>(x.size()));
  functor(p, f);
  const double rss = f.squaredNorm();
  using S = Eigen::LevenbergMarquardtSpace::Status;
  if (status == S::ImproperInputParameters || status == S::TooManyFunctionEvaluation || !std::isfinite(rss))
    throw FitError("fit_lorentzian_dip: optimizer did not converge (rss " + std::to_string(rss) + ")");

  LorentzianFit fit;
  fit.background = p[0];
  fit.slope = p[1];
  fit.center = p[2];
  fit.depth = p[3];
  fit.width = std::exp(p[4]);
  fit.rss = rss;
  fit.iterations = static_cast<int>(lm.iterations());

  Eigen::MatrixXd J(static_cast<Eigen::Index>(x.size()), 5);
  functor.df(p, J);
  const auto dof = static_cast<double>(x.size()) - 5.0;
  if (dof > 0.0) {
    const Eigen::MatrixXd cov = (J.transpose() * J).completeOrthogonalDecomposition().pseudoInverse() * (rss / dof);
    fit.center_error = std::sqrt(std::max(cov(2, 2), 0.0));
  }
  return fit;
}

}  // namespace dpt
