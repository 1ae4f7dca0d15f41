#pragma once

// Linear damped-wave flow. With a = sqrt(1/4 - |xi|^2), b = sqrt(|xi|^2 - 1/4):
//
//   L(t, xi) = sinh(t a) / a   (|xi| < 1/2)
//            = sin(t b) / b    (|xi| > 1/2)
//
// and D(t) = exp(-t/2) L(t, nabla) solves v'' + v' - Lap v = 0, v(0) = 0,
// v'(0) = g. Near |xi| = 1/2 both closed forms are replaced by the even power
// series in kappa = |xi|^2 - 1/4 (the removable singularity).

#include <optional>
#include <utility>
#include <vector>

#include "bwl/grid.hpp"
#include "bwl/report.hpp"

namespace bwl {

/// Half-width of the series band around |xi| = 1/2.
inline constexpr double kBandHalfwidth = 1e-3;

/// L(t, |xi|). Overflows to inf for very large t at low frequency; use
/// damped_symbol for the exp(-t/2) L product.
double symbol_L(double t, double xi_abs);
/// d/dt L(t, |xi|).
double symbol_dtL(double t, double xi_abs);
/// exp(-t/2) L(t, |xi|), evaluated without forming sinh.
double damped_symbol(double t, double xi_abs);
/// d/dt [exp(-t/2) L] = exp(-t/2) (dtL - L/2).
double damped_symbol_dt(double t, double xi_abs);

GridField apply_D(double t, const GridField& g);
GridField apply_dtD(double t, const GridField& g);
/// D(t)(u0 + u1) + dtD(t) u0.
GridField linear_solution(const GridField& u0, const GridField& u1, double t);
/// Time derivative of linear_solution, dtD(t) u1 + Lap D(t) u0.
GridField linear_solution_dt(const GridField& u0, const GridField& u1, double t);

struct LpLqOptions {
  double p = 2.0;
  double q = 1.0;
  double s1 = 0.0;
  double s2 = 0.0;
  /// Besov norms (true) or Lebesgue / Bessel-potential norms (false).
  bool besov = true;
  std::vector<double> times;
  /// Window for the low-frequency decay fit; defaults to the last decade.
  std::optional<std::pair<double, double>> fit_window;
};

/// Measures ||D(t) g|| against the low/high-frequency bound of the L^p-L^q
/// estimate. Scalars: fitted_low_exponent, expected_low_exponent,
/// fitted_lhs_exponent, fitted_delta, max_ratio. Table "lplq".
ExperimentReport verify_lp_lq(const GridField& g, const LpLqOptions& opts);

/// Growth check for high-frequency data: fits
///   log ||D(t) g|| + t/2 = c + a t + delta log<t>
/// and reports a (exponential residue) and delta.
struct HighFrequencyGrowth {
  double linear_rate = 0.0;
  double delta = 0.0;
  double max_residual = 0.0;
};
HighFrequencyGrowth fit_high_frequency_growth(const std::vector<double>& t,
                                              const std::vector<double>& norms);

struct BlockEstimateOptions {
  double p = 2.0;
  double q = 1.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double delta = 0.0;  // <t>^delta in the high-frequency bound
  std::vector<double> times;
};

struct BlockEstimateReport {
  int k = 0;
  bool high = false;  // k > 0 uses the exp(-t/2) bound
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> bound;
  std::vector<double> ratio;
  double max_ratio = 0.0;
  /// Low blocks: late-time decay exponent of the lhs. High blocks: growth
  /// exponent of exp(t/2) 2^{-k(s1+beta-1)} lhs / ||Delta_k g||.
  double fitted_exponent = 0.0;
};

/// Per-block form of the L^p-L^q estimate for block k of the default blocks.
BlockEstimateReport verify_block_estimate(const GridField& g, int k, const BlockEstimateOptions& opts);

}  // namespace bwl
