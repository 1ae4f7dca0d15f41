#pragma once

// Bony paraproducts on the torus, over the grid's dyadic range:
//   T_f g  = sum_j chi_{<=2^{j-2}}(nabla) f * Delta_j g
//   R(f,g) = sum_j Delta_j f * (Delta_{j-1} + Delta_j + Delta_{j+1}) g
// All products are zero-padded by 2 and accumulated on the fine grid.

#include <cstdint>
#include <optional>

#include "bwl/grid.hpp"
#include "bwl/littlewood_paley.hpp"

namespace bwl {

GridField para_T(const GridField& f, const GridField& g);
GridField para_R(const GridField& f, const GridField& g);

/// ||fg - T_f g - T_g f - R(f,g)||_2 / ||fg||_2 with fg the plain pointwise
/// product on the grid and the three sums dealiased. Inputs whose spectra stay
/// below a quarter of the grid's frequency range give rounding-level values;
/// energy above that aliases in fg and shows up here. Zero when fg = 0.
double decomposition_residual(const GridField& f, const GridField& g);

/// Residuals above this are reported as aliasing.
inline constexpr double kAliasingFlag = 1e-10;

/// V_j f = sum_{k=-j}^{j} Delta_k f, clipped to the grid's dyadic range.
GridField truncate_V(const GridField& f, int j);

struct LeibnizConfig {
  double alpha = 0.7;
  double r = 2.0;
  double p1 = 4.0;
  double p2 = 4.0;
  double q1 = 4.0;
  double q2 = 4.0;
  int ensemble_size = 500;
  /// Random-field spectrum |fhat(xi)| ~ |xi|^{-spectrum_slope}.
  double spectrum_slope = 1.0;

  /// Throws unless alpha > 0, r, q1, q2 finite, all exponents >= 1 and
  /// 1/r = 1/p1 + 1/q1 = 1/p2 + 1/q2 (to 1e-12).
  void validate() const;
};

/// ||fg||_{B^alpha_{r,2}} / (||f||_{B^alpha_{p1,2}} ||g||_{L^q1} + ||g||_{B^alpha_{p2,2}} ||f||_{L^q2}).
/// nullopt when the denominator vanishes.
std::optional<double> leibniz_ratio(const GridField& f, const GridField& g, const LeibnizConfig& cfg);

struct LeibnizEnsemble {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  int samples = 0;
  int undefined = 0;
};

/// Ratio statistics over cfg.ensemble_size random pairs. Member i uses seeds
/// derived from (seed, i) and frequencies in [xi_lo, xi_hi]; the fields are
/// placed by physical wavenumber, so refining the grid reproduces the same
/// functions.
LeibnizEnsemble leibniz_ensemble(const TorusGrid& grid, const LeibnizConfig& cfg, double xi_lo,
                                 double xi_hi, std::uint64_t seed, int jobs = 1);

}  // namespace bwl
