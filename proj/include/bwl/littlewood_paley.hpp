#pragma once

// Smooth cutoff chi and the dyadic frequency projections built from it:
//   chi_{<=a}(xi) = chi(|xi| / a),   chi_{>a} = 1 - chi_{<=a},
//   chi_{2^j}     = chi_{<=2^j} - chi_{<=2^{j-1}}.
// On a grid the homogeneous sum over j is truncated to [j_min, j_max]; the
// remaining low block chi_{<=2^{j_min-1}} carries only the DC mode.

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "bwl/grid.hpp"

namespace bwl {

/// The standard cutoff: 1 on [0, 1], 0 on [25/24, inf), smooth step built from
/// exp(-1/t) in between. Throws for t < 0.
double chi(double t);

inline constexpr double kCutoffOuter = 25.0 / 24.0;

class CutoffProfile {
 public:
  explicit CutoffProfile(std::function<double(double)> eval) : eval_(std::move(eval)) {}
  static CutoffProfile standard();

  double operator()(double t) const { return eval_(t); }

 private:
  std::function<double(double)> eval_;
};

class DyadicBlocks {
 public:
  /// Range j_min = ceil(log2(2 pi / L)) - 1, j_max = ceil(log2(pi N / L)) + 1.
  explicit DyadicBlocks(TorusGrid grid, CutoffProfile cutoff = CutoffProfile::standard());
  /// Explicit range, e.g. a deliberately truncated one.
  DyadicBlocks(TorusGrid grid, CutoffProfile cutoff, int j_min, int j_max);

  /// Shared blocks with the standard cutoff and default range.
  static std::shared_ptr<const DyadicBlocks> for_grid(const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }
  const CutoffProfile& cutoff() const { return cutoff_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  bool contains(int j) const { return j >= j_min_ && j <= j_max_; }

  /// chi_{2^j} sampled on the r2c layout.
  std::span<const double> block_symbol(int j) const;
  /// chi_{<=2^{j_min-1}} sampled on the r2c layout.
  std::span<const double> low_symbol() const { return low_; }

  double low_pass_value(double a, double abs_xi) const { return cutoff_(abs_xi / a); }
  double annulus_value(int j, double abs_xi) const;

 private:
  void sample();

  TorusGrid grid_;
  CutoffProfile cutoff_;
  int j_min_;
  int j_max_;
  std::vector<std::vector<double>> blocks_;
  std::vector<double> low_;
};

int default_j_min(const TorusGrid& grid);
int default_j_max(const TorusGrid& grid);

struct LowPass {   // chi_{<=a}(nabla)
  double a;
};
struct HighPass {  // chi_{>a}(nabla)
  double a;
};
struct Annulus {   // Delta_j
  int j;
};
struct Widened {   // Delta_{j-1} + Delta_j + Delta_{j+1}
  int j;
};
using Projection = std::variant<LowPass, HighPass, Annulus, Widened>;

GridField project(const DyadicBlocks& blocks, const GridField& f, const Projection& kind);
GridField project(const GridField& f, const Projection& kind);

/// Max over nonzero lattice frequencies of |1 - (low + sum_j chi_{2^j})(xi)|.
double partition_residual(const DyadicBlocks& blocks);

}  // namespace bwl
