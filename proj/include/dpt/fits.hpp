#pragma once

#include <cstdint>
#include <vector>

namespace dpt {

struct BreakpointOptions {
  int grid_points = 400;
  int bootstrap = 200;
  std::uint64_t seed = 12345;
};

/// Continuous two-segment line y = a + s1 min(x - c, 0) + s2 max(x - c, 0).
struct BreakpointFit {
  double breakpoint = 0.0;
  double uncertainty = 0.0;  // std of the bootstrap breakpoints
  double value_at_break = 0.0;
  double slope_left = 0.0;
  double slope_right = 0.0;
  double rss = 0.0;  // weighted
  int bootstrap_used = 0;
};

/// Weighted least-squares breakpoint: grid scan over the interior, Brent
/// refinement, residual-bootstrap uncertainty. `weights` may be empty (all 1).
/// Throws FitError when the kink does not improve on a single line or the
/// optimum sits on the edge of the admissible range.
BreakpointFit fit_breakpoint(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& weights = {}, const BreakpointOptions& options = {});

/// y = a + b x - d w^2 / ((x - c)^2 + w^2)
struct LorentzianFit {
  double background = 0.0;  // a
  double slope = 0.0;       // b
  double center = 0.0;      // c
  double depth = 0.0;       // d
  double width = 0.0;       // w (> 0)
  double center_error = 0.0;
  double rss = 0.0;
  int iterations = 0;

  double operator()(double x) const;
};

/// Variable-projection grid start followed by Levenberg-Marquardt.
/// Throws FitError (with the final residual) when the optimizer does not converge.
LorentzianFit fit_lorentzian_dip(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dpt
