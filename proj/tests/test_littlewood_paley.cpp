#include <cmath>
#include <numbers>

#include "bwl/littlewood_paley.hpp"
#include "bwl/random_fields.hpp"
#include "doctest.h"

using namespace bwl;

TEST_CASE("cutoff is a smooth step from 1 on [0,1] to 0 beyond 25/24") {
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(kCutoffOuter) == 0.0);
  CHECK(chi(3.0) == 0.0);
  CHECK_THROWS_AS(chi(-0.1), std::invalid_argument);
  double prev = 1.0;
  for (double t = 1.0; t <= kCutoffOuter; t += 1e-4) {
    const double v = chi(t);
    CHECK(v <= prev + 1e-15);
    CHECK(v >= 0.0);
    prev = v;
  }
  // Flat to all orders at both ends: difference quotients vanish.
  CHECK(std::abs(chi(1.0 + 1e-3) - 1.0) < 1e-12);
  CHECK(chi(kCutoffOuter - 1e-3) < 1e-12);
}

TEST_CASE("dyadic range follows the grid") {
  const auto g = make_grid(1, 4096, 400.0);
  CHECK(default_j_min(g) == static_cast<int>(std::ceil(std::log2(2 * std::numbers::pi / 400.0))) - 1);
  CHECK(default_j_max(g) == static_cast<int>(std::ceil(std::log2(std::numbers::pi * 4096 / 400.0))) + 1);
}

TEST_CASE("partition of unity on the lattice") {
  for (auto g : {make_grid(1, 256, 64.0), make_grid(1, 4096, 400.0), make_grid(2, 256, 100.0)}) {
    const DyadicBlocks blocks(g);
    CHECK(partition_residual(blocks) < 1e-12);
  }
}

TEST_CASE("a truncated range leaves a visible hole") {
  const auto g = make_grid(1, 1024, 100.0);
  const DyadicBlocks cut(g, CutoffProfile::standard(), default_j_min(g), default_j_max(g) - 3);
  CHECK(partition_residual(cut) > 0.5);
}

TEST_CASE("block symbols are supported on their annulus") {
  const auto g = make_grid(1, 1024, 100.0);
  const auto blocks = DyadicBlocks::for_grid(g);
  const auto freq = g.half_abs_frequency();
  for (int j = blocks->j_min(); j <= blocks->j_max(); ++j) {
    const auto b = blocks->block_symbol(j);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double x = freq[i];
      if (x < std::ldexp(1.0, j - 1) || x > std::ldexp(kCutoffOuter, j)) CHECK(b[i] == 0.0);
      CHECK(b[i] >= 0.0);
      CHECK(b[i] <= 1.0);
    }
  }
  CHECK_THROWS_AS(blocks->block_symbol(blocks->j_max() + 1), std::out_of_range);
}

TEST_CASE("projections reconstruct a zero-mean field") {
  const auto g = make_grid(2, 64, 20.0);
  const auto f = random_power_law(g, 1.0, g.frequency_unit(), 0.8 * g.max_frequency(), 11);
  const auto blocks = DyadicBlocks::for_grid(g);
  GridField sum = GridField::zeros(g);
  for (int j = blocks->j_min(); j <= blocks->j_max(); ++j) sum = sum + project(*blocks, f, Annulus{j});
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(sum[i] - f[i]));
  CHECK(err < 1e-12);

  const auto low = project(f, LowPass{2.0});
  const auto high = project(f, HighPass{2.0});
  double split = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) split = std::max(split, std::abs(low[i] + high[i] - f[i]));
  CHECK(split < 1e-12);
}

TEST_CASE("a mode inside the flat part of a block passes unchanged") {
  const auto g = make_grid(1, 512, 2 * std::numbers::pi);  // unit frequency 1
  // |xi| = 6 lies where chi_{2^3} = chi(6/8) - chi(6/4) = 1.
  const auto f = GridField::from_function(g, [](const Frequency& x) { return std::cos(6 * x[0]); });
  const auto p = project(f, Annulus{3});
  const auto w = project(f, Widened{3});
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(p[i] == doctest::Approx(f[i]).epsilon(1e-12));
    CHECK(w[i] == doctest::Approx(f[i]).epsilon(1e-12));
  }
}
