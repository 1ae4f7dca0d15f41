#include "bwl/littlewood_paley.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace bwl {

namespace {

double smooth_ramp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

double chi(double t) {
  if (t < 0.0 || std::isnan(t)) throw std::invalid_argument("chi: argument must be nonnegative");
  if (t <= 1.0) return 1.0;
  if (t >= kCutoffOuter) return 0.0;
  constexpr double c = 24.0;
  const double up = smooth_ramp((kCutoffOuter - t) * c);
  const double down = smooth_ramp((t - 1.0) * c);
  return up / (up + down);
}

CutoffProfile CutoffProfile::standard() { return CutoffProfile(&chi); }

int default_j_min(const TorusGrid& grid) {
  return static_cast<int>(std::ceil(std::log2(grid.frequency_unit()))) - 1;
}

int default_j_max(const TorusGrid& grid) {
  return static_cast<int>(std::ceil(std::log2(grid.max_frequency()))) + 1;
}

DyadicBlocks::DyadicBlocks(TorusGrid grid, CutoffProfile cutoff)
    : DyadicBlocks(grid, std::move(cutoff), default_j_min(grid), default_j_max(grid)) {}

DyadicBlocks::DyadicBlocks(TorusGrid grid, CutoffProfile cutoff, int j_min, int j_max)
    : grid_(std::move(grid)), cutoff_(std::move(cutoff)), j_min_(j_min), j_max_(j_max) {
  if (j_min > j_max) throw std::invalid_argument("DyadicBlocks: empty index range");
  sample();
}

double DyadicBlocks::annulus_value(int j, double abs_xi) const {
  return cutoff_(abs_xi / std::ldexp(1.0, j)) - cutoff_(abs_xi / std::ldexp(1.0, j - 1));
}

void DyadicBlocks::sample() {
  auto abs_freq = grid_.half_abs_frequency();
  const double low_a = std::ldexp(1.0, j_min_ - 1);
  low_.resize(abs_freq.size());
  for (std::size_t i = 0; i < abs_freq.size(); ++i) low_[i] = cutoff_(abs_freq[i] / low_a);
  blocks_.clear();
  for (int j = j_min_; j <= j_max_; ++j) {
    std::vector<double> s(abs_freq.size());
    for (std::size_t i = 0; i < abs_freq.size(); ++i) s[i] = annulus_value(j, abs_freq[i]);
    blocks_.push_back(std::move(s));
  }
}

std::span<const double> DyadicBlocks::block_symbol(int j) const {
  if (!contains(j))
    throw std::out_of_range("DyadicBlocks: block index " + std::to_string(j) + " outside [" +
                            std::to_string(j_min_) + ", " + std::to_string(j_max_) + "]");
  return blocks_[static_cast<std::size_t>(j - j_min_)];
}

std::shared_ptr<const DyadicBlocks> DyadicBlocks::for_grid(const TorusGrid& grid) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const DyadicBlocks>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(grid.dim(), grid.points_per_axis(), grid.box_length());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto blocks = std::make_shared<const DyadicBlocks>(grid);
  cache.emplace(key, blocks);
  return blocks;
}

GridField project(const DyadicBlocks& blocks, const GridField& f, const Projection& kind) {
  if (!(blocks.grid() == f.grid())) throw std::invalid_argument("project: grid mismatch");
  return std::visit(
      [&](const auto& k) -> GridField {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LowPass> || std::is_same_v<K, HighPass>) {
          if (!(k.a > 0.0)) throw std::invalid_argument("project: cutoff radius must be positive");
          const bool high = std::is_same_v<K, HighPass>;
          auto symbol = sample_radial(f.grid(), [&](double r) {
            const double low = blocks.low_pass_value(k.a, r);
            return high ? 1.0 - low : low;
          });
          return apply_sampled_multiplier(symbol, f);
        } else if constexpr (std::is_same_v<K, Annulus>) {
          return apply_sampled_multiplier(blocks.block_symbol(k.j), f);
        } else {
          if (!blocks.contains(k.j)) (void)blocks.block_symbol(k.j);  // throws
          auto symbol = sample_radial(f.grid(), [&](double r) {
            return blocks.annulus_value(k.j - 1, r) + blocks.annulus_value(k.j, r) +
                   blocks.annulus_value(k.j + 1, r);
          });
          return apply_sampled_multiplier(symbol, f);
        }
      },
      kind);
}

GridField project(const GridField& f, const Projection& kind) {
  return project(*DyadicBlocks::for_grid(f.grid()), f, kind);
}

double partition_residual(const DyadicBlocks& blocks) {
  auto abs_freq = blocks.grid().half_abs_frequency();
  auto low = blocks.low_symbol();
  double worst = 0.0;
  for (std::size_t i = 0; i < abs_freq.size(); ++i) {
    if (abs_freq[i] == 0.0) continue;
    double sum = low[i];
    for (int j = blocks.j_min(); j <= blocks.j_max(); ++j) sum += blocks.block_symbol(j)[i];
    worst = std::max(worst, std::abs(1.0 - sum));
  }
  return worst;
}

}  // namespace bwl
