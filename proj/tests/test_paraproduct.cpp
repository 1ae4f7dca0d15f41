#include <cmath>

#include "bwl/norms.hpp"
#include "bwl/paraproduct.hpp"
#include "bwl/random_fields.hpp"
#include "doctest.h"

using namespace bwl;

namespace {

double rel_l2(const GridField& a, const GridField& b) { return lebesgue_norm(a - b, 2.0) / lebesgue_norm(b, 2.0); }

}  // namespace

TEST_CASE("decomposition identity holds for band-limited pairs") {
  for (auto g : {make_grid(1, 256, 50.0), make_grid(2, 64, 20.0)}) {
    const double hi = 0.45 * g.max_frequency();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto f = random_power_law(g, 1.0, g.frequency_unit(), hi, derive_seed(seed, 0));
      const auto h = random_power_law(g, 0.5, g.frequency_unit(), hi, derive_seed(seed, 1));
      CHECK(decomposition_residual(f, h) < 1e-12);
    }
  }
}

TEST_CASE("energy above a quarter of the grid shows up as aliasing") {
  const auto g = make_grid(1, 256, 50.0);
  const auto f = random_power_law(g, 0.0, 0.6 * g.max_frequency(), 0.9 * g.max_frequency(), 1);
  const auto h = random_power_law(g, 0.0, 0.6 * g.max_frequency(), 0.9 * g.max_frequency(), 2);
  CHECK(decomposition_residual(f, h) > kAliasingFlag);
}

TEST_CASE("paraproduct by a constant is multiplication") {
  const auto g = make_grid(1, 128, 30.0);
  const auto h = random_power_law(g, 1.0, g.frequency_unit(), 3.0, 4);
  const auto c = GridField::constant(g, 2.5);
  CHECK(rel_l2(para_T(c, h), h * 2.5) < 1e-12);
  CHECK(lebesgue_norm(para_T(h, c), 2.0) < 1e-12);
  CHECK(lebesgue_norm(para_R(c, h), 2.0) < 1e-12);
}

TEST_CASE("paraproducts are bilinear") {
  const auto g = make_grid(2, 32, 10.0);
  const auto a = random_power_law(g, 1.0, g.frequency_unit(), 3.0, 1);
  const auto b = random_power_law(g, 1.0, g.frequency_unit(), 3.0, 2);
  const auto h = random_power_law(g, 1.0, g.frequency_unit(), 3.0, 3);
  CHECK(rel_l2(para_T(a + b * 2.0, h), para_T(a, h) + para_T(b, h) * 2.0) < 1e-12);
  CHECK(rel_l2(para_R(h, a + b), para_R(h, a) + para_R(h, b)) < 1e-12);
}

TEST_CASE("V_j truncation") {
  const auto g = make_grid(1, 256, 50.0);
  const auto f = random_power_law(g, 1.0, g.frequency_unit(), 5.0, 8);
  const auto all = truncate_V(f, 64);
  CHECK(rel_l2(all, f) < 1e-12);
  CHECK(lebesgue_norm(truncate_V(f, 0), 2.0) < lebesgue_norm(f, 2.0));
  CHECK_THROWS_AS(truncate_V(f, -1), std::invalid_argument);
}

TEST_CASE("Leibniz configuration enforces the Hoelder relation") {
  LeibnizConfig c;
  CHECK_NOTHROW(c.validate());
  c.q1 = 3.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = LeibnizConfig{0.5, 3.0, 6.0, 4.0, 6.0, 12.0};
  CHECK_NOTHROW(c.validate());
  c.alpha = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("Leibniz ensemble is deterministic and independent of threading") {
  const auto g = make_grid(1, 128, 32.0);
  LeibnizConfig c;
  c.ensemble_size = 24;
  const auto a = leibniz_ensemble(g, c, g.frequency_unit(), 4.0, 99, 1);
  const auto b = leibniz_ensemble(g, c, g.frequency_unit(), 4.0, 99, 3);
  CHECK(a.samples == 24);
  CHECK(a.max_ratio == b.max_ratio);
  CHECK(a.mean_ratio == b.mean_ratio);
  CHECK(a.max_ratio > 0.0);
  CHECK(std::isfinite(a.max_ratio));

  const auto z = GridField::zeros(g);
  CHECK_FALSE(leibniz_ratio(z, z, c).has_value());
}

TEST_CASE("random fields are grid independent") {
  const auto coarse = make_grid(1, 128, 32.0);
  const auto fine = make_grid(1, 256, 32.0);
  const auto a = random_power_law(coarse, 1.0, coarse.frequency_unit(), 4.0, 17);
  const auto b = random_power_law(fine, 1.0, fine.frequency_unit(), 4.0, 17);
  const auto ar = refine(a, 2);
  CHECK(rel_l2(ar, b) < 1e-12);
  CHECK(lebesgue_norm(a, 2.0) == doctest::Approx(1.0));
  CHECK(std::abs(a.mean()) < 1e-14);
  CHECK_THROWS_AS(random_power_law(coarse, 1.0, 1.0, coarse.max_frequency(), 1), std::invalid_argument);
}
