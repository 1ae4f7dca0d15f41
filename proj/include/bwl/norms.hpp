#pragma once

// Lebesgue, Sobolev and Besov (semi)norms on the torus, and the weighted
// space-time norms X(T), Y(T) used by the fixed-point construction.
//
// Homogeneous seminorms sum the dyadic blocks j_min..j_max; the DC mode lives
// in the low block and is excluded.

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bwl/grid.hpp"
#include "bwl/littlewood_paley.hpp"

namespace bwl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct BesovParams {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  bool homogeneous = true;
};

/// Parameters of the nonlinear problem and the exponents derived from them.
struct ProblemParams {
  int n = 1;
  double r = 4.0;
  double s = 1.0;
  int p = 2;  // nonlinearity u^p
  double eps = 0.0;

  double beta = 0.0;    // (n-1)(1/2 - 1/r)
  double eta = 0.0;     // (s-1)/2 + (n/2)(p/r - 1/2)
  double sigma1 = 0.0;  // max{1, r/p} + eps
  double sigma2 = 0.0;  // r if 2s >= n, else min{r, 2n / (p(n-2s))}
  double fujita = 0.0;  // 1 + 2r/n

  /// eps defaults to 0.05 * (sigma2 - max{1, r/p}). Throws when r is not in
  /// (2, inf), p < 2, n < 1, or the sigma window is empty.
  static ProblemParams make(int n, double r, double s, int p, std::optional<double> eps = {});

  /// Exponent of <t> in the X(T) weight on the B^s_{2,2} term.
  double x_weight_exponent() const;
};

class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<GridField> fields);

  const TorusGrid& grid() const { return fields_.front().grid(); }
  std::span<const double> times() const { return times_; }
  const std::vector<GridField>& fields() const { return fields_; }
  std::size_t size() const { return times_.size(); }
  const GridField& operator[](std::size_t i) const { return fields_[i]; }

  Trajectory scaled(double factor) const;
  /// Pointwise difference on a shared time grid.
  Trajectory operator-(const Trajectory& other) const;

 private:
  std::vector<double> times_;
  std::vector<GridField> fields_;
};

/// Quadrature of the L^p integral with h^n weights; p = inf gives max |f|.
double lebesgue_norm(const GridField& f, double p);

/// ||Delta_j f||_{L^p} for j = j_min..j_max (index j - j_min).
std::vector<double> block_norms(const DyadicBlocks& blocks, const GridField& f, double p);
/// Same from a raw r2c spectrum.
std::vector<double> block_norms(const DyadicBlocks& blocks, std::span<const Complex> half, double p);

double besov_seminorm(const GridField& f, const BesovParams& bp, const DyadicBlocks& blocks);
double besov_seminorm(const GridField& f, const BesovParams& bp);
/// Combines precomputed block norms (index j - j_min) into the l^q sum.
double besov_from_blocks(std::span<const double> norms, int j_min, double s, double q);

/// ||<nabla>^s f||_{L^p}, p in (1, inf).
double sobolev_norm(const GridField& f, double s, double p);

/// Per-time value of <t>^{w} ||phi||_{B^s_{2,2}} + ||phi||_{B^0_{r,2}}.
std::vector<double> x_profile(const Trajectory& traj, const ProblemParams& pp);
double x_norm(const Trajectory& traj, const ProblemParams& pp);

/// Geometric grid on [sigma1, sigma2]: `interior` points plus both endpoints.
std::vector<double> gamma_grid(const ProblemParams& pp, int interior = 8);
std::vector<double> y_profile(const Trajectory& traj, const ProblemParams& pp, int interior = 8);
double y_norm(const Trajectory& traj, const ProblemParams& pp, int interior = 8);

/// ||f||_{B^alpha_{q,2}} / (||f||_{B^0_{r,2}}^{1-theta} ||f||_{B^s_{2,2}}^theta).
/// Rejects tuples off the scaling line n/q - alpha = (1-theta) n/r + theta(n/2 - s)
/// (tolerance 1e-10), alpha > theta s, or theta outside [0, 1].
double interpolation_check(const GridField& f, const ProblemParams& pp, double q, double alpha,
                           double theta);

}  // namespace bwl
