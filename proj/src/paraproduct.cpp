#include "bwl/paraproduct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bwl/fft.hpp"
#include "bwl/norms.hpp"
#include "bwl/parallel.hpp"
#include "bwl/random_fields.hpp"

namespace bwl {

namespace {

// Sums products of filtered pairs on the doubly padded grid.
class FineAccumulator {
 public:
  explicit FineAccumulator(const TorusGrid& grid)
      : grid_(grid), fine_n_(2 * grid.points_per_axis()),
        acc_(grid.size() << grid.dim(), 0.0),
        a_(acc_.size()), b_(acc_.size()) {}

  void add(std::span<const Complex> f, std::span<const double> fsym, std::span<const Complex> g,
           std::span<const double> gsym) {
    if (!filter(f, fsym, a_) || !filter(g, gsym, b_)) return;
    for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += a_[i] * b_[i];
  }

  GridField result() const {
    std::vector<Complex> fine_half(fft::half_size(grid_.dim(), fine_n_));
    fft::r2c(grid_.dim(), fine_n_, acc_, fine_half);
    return GridField::from_half_spectrum(grid_, fft::truncate_half(grid_, fine_half, fine_n_));
  }

 private:
  // Fine-grid samples of F^{-1}[sym * f]; false when the product is zero.
  bool filter(std::span<const Complex> half, std::span<const double> sym, std::vector<double>& out) {
    work_.resize(half.size());
    bool any = false;
    for (std::size_t i = 0; i < half.size(); ++i) {
      work_[i] = half[i] * sym[i];
      any = any || work_[i] != Complex{};
    }
    if (!any) return false;
    auto padded = fft::pad_half(grid_, work_, fine_n_);
    fft::c2r(grid_.dim(), fine_n_, padded, out);
    const double inv = 1.0 / static_cast<double>(out.size());
    for (double& v : out) v *= inv;
    return true;
  }

  TorusGrid grid_;
  int fine_n_;
  std::vector<double> acc_, a_, b_;
  std::vector<Complex> work_;
};

std::vector<double> low_pass_symbol(const DyadicBlocks& blocks, double a) {
  auto abs_freq = blocks.grid().half_abs_frequency();
  std::vector<double> s(abs_freq.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = blocks.low_pass_value(a, abs_freq[i]);
  return s;
}

std::vector<double> widened_symbol(const DyadicBlocks& blocks, int j) {
  std::vector<double> s(blocks.grid().half_size(), 0.0);
  for (int k = std::max(j - 1, blocks.j_min()); k <= std::min(j + 1, blocks.j_max()); ++k) {
    auto b = blocks.block_symbol(k);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += b[i];
  }
  return s;
}

void require_same_grid(const GridField& f, const GridField& g, const char* who) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

void add_T(FineAccumulator& acc, const DyadicBlocks& blocks, std::span<const Complex> f,
           std::span<const Complex> g) {
  for (int j = blocks.j_min(); j <= blocks.j_max(); ++j) {
    auto low = low_pass_symbol(blocks, std::ldexp(1.0, j - 2));
    acc.add(f, low, g, blocks.block_symbol(j));
  }
}

void add_R(FineAccumulator& acc, const DyadicBlocks& blocks, std::span<const Complex> f,
           std::span<const Complex> g) {
  for (int j = blocks.j_min(); j <= blocks.j_max(); ++j)
    acc.add(f, blocks.block_symbol(j), g, widened_symbol(blocks, j));
}

}  // namespace

GridField para_T(const GridField& f, const GridField& g) {
  require_same_grid(f, g, "para_T");
  const auto& blocks = *DyadicBlocks::for_grid(f.grid());
  FineAccumulator acc(f.grid());
  add_T(acc, blocks, f.half_spectrum(), g.half_spectrum());
  return acc.result();
}

GridField para_R(const GridField& f, const GridField& g) {
  require_same_grid(f, g, "para_R");
  const auto& blocks = *DyadicBlocks::for_grid(f.grid());
  FineAccumulator acc(f.grid());
  add_R(acc, blocks, f.half_spectrum(), g.half_spectrum());
  return acc.result();
}

double decomposition_residual(const GridField& f, const GridField& g) {
  require_same_grid(f, g, "decomposition_residual");
  std::vector<double> naive(f.size());
  for (std::size_t i = 0; i < naive.size(); ++i) naive[i] = f[i] * g[i];
  const GridField product(f.grid(), std::move(naive));
  const double scale = lebesgue_norm(product, 2.0);
  if (scale == 0.0) return 0.0;

  const auto& blocks = *DyadicBlocks::for_grid(f.grid());
  FineAccumulator acc(f.grid());
  add_T(acc, blocks, f.half_spectrum(), g.half_spectrum());
  add_T(acc, blocks, g.half_spectrum(), f.half_spectrum());
  add_R(acc, blocks, f.half_spectrum(), g.half_spectrum());
  return lebesgue_norm(product - acc.result(), 2.0) / scale;
}

GridField truncate_V(const GridField& f, int j) {
  if (j < 0) throw std::invalid_argument("truncate_V: index must be nonnegative");
  const auto& blocks = *DyadicBlocks::for_grid(f.grid());
  std::vector<double> sym(f.grid().half_size(), 0.0);
  for (int k = std::max(-j, blocks.j_min()); k <= std::min(j, blocks.j_max()); ++k) {
    auto b = blocks.block_symbol(k);
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] += b[i];
  }
  return apply_sampled_multiplier(sym, f);
}

void LeibnizConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("LeibnizConfig: alpha must be positive");
  for (double e : {r, p1, p2, q1, q2})
    if (!(e >= 1.0)) throw std::invalid_argument("LeibnizConfig: exponents must be >= 1");
  if (std::isinf(r) || std::isinf(q1) || std::isinf(q2))
    throw std::invalid_argument("LeibnizConfig: r, q1, q2 must be finite");
  if (std::abs(1.0 / r - 1.0 / p1 - 1.0 / q1) > 1e-12 || std::abs(1.0 / r - 1.0 / p2 - 1.0 / q2) > 1e-12)
    throw std::invalid_argument("LeibnizConfig: Hoelder relation 1/r = 1/p + 1/q violated");
  if (ensemble_size < 1) throw std::invalid_argument("LeibnizConfig: empty ensemble");
}

std::optional<double> leibniz_ratio(const GridField& f, const GridField& g, const LeibnizConfig& cfg) {
  cfg.validate();
  require_same_grid(f, g, "leibniz_ratio");
  const auto& blocks = *DyadicBlocks::for_grid(f.grid());
  const double den = besov_seminorm(f, {cfg.alpha, cfg.p1, 2.0, true}, blocks) * lebesgue_norm(g, cfg.q1) +
                     besov_seminorm(g, {cfg.alpha, cfg.p2, 2.0, true}, blocks) * lebesgue_norm(f, cfg.q2);
  if (!(den > 0.0)) return std::nullopt;
  const double num = besov_seminorm(dealiased_product(f, g), {cfg.alpha, cfg.r, 2.0, true}, blocks);
  return num / den;
}

LeibnizEnsemble leibniz_ensemble(const TorusGrid& grid, const LeibnizConfig& cfg, double xi_lo,
                                 double xi_hi, std::uint64_t seed, int jobs) {
  cfg.validate();
  const auto m = static_cast<std::size_t>(cfg.ensemble_size);
  std::vector<std::optional<double>> ratios(m);
  parallel_for(m, jobs, [&](std::size_t i) {
    auto f = random_power_law(grid, cfg.spectrum_slope, xi_lo, xi_hi, derive_seed(seed, 2 * i));
    auto g = random_power_law(grid, cfg.spectrum_slope, xi_lo, xi_hi, derive_seed(seed, 2 * i + 1));
    ratios[i] = leibniz_ratio(f, g, cfg);
  });

  LeibnizEnsemble out;
  double sum = 0.0;
  for (const auto& r : ratios) {
    if (!r) {
      ++out.undefined;
      continue;
    }
    ++out.samples;
    sum += *r;
    out.max_ratio = std::max(out.max_ratio, *r);
  }
  if (out.samples > 0) out.mean_ratio = sum / out.samples;
  return out;
}

}  // namespace bwl
