#pragma once

#include <span>
#include <utility>

namespace bwl {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // max |y - fit(x)|
  int points = 0;
};

/// Ordinary least squares. Needs at least two distinct abscissae.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// <t> = sqrt(1 + t^2).
double japanese(double t);

/// Fits log(value) against log<t> over samples with t in [t_lo, t_hi] and a
/// positive value; the slope is the decay exponent.
LineFit fit_decay_exponent(std::span<const double> t, std::span<const double> values,
                           double t_lo, double t_hi);

/// Default fit window: the last decade of the grid, [t_max / 10, t_max].
std::pair<double, double> last_decade(std::span<const double> t);

}  // namespace bwl
