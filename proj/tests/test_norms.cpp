#include <cmath>
#include <numbers>

#include "bwl/norms.hpp"
#include "bwl/random_fields.hpp"
#include "doctest.h"

using namespace bwl;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Lebesgue norms of closed-form fields") {
  const auto g = make_grid(1, 1024, 80.0);
  CHECK(lebesgue_norm(GridField::constant(g, 2.0), 3.0) == doctest::Approx(2.0 * std::cbrt(80.0)));
  // int exp(-p x^2 / (2 w^2)) dx = w sqrt(2 pi / p)
  const double w = 1.3;
  const auto f = gaussian_profile(g, w);
  for (double p : {1.0, 2.0, 4.0})
    CHECK(lebesgue_norm(f, p) == doctest::Approx(std::pow(w * std::sqrt(2 * kPi / p), 1.0 / p)).epsilon(1e-12));
  CHECK(lebesgue_norm(f, kInfinity) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lebesgue_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("Besov seminorm of a mode in the flat part of one block") {
  const auto g = make_grid(1, 512, 2 * kPi);
  const auto f = GridField::from_function(g, [](const Frequency& x) { return std::cos(6 * x[0]); });
  const double l4 = lebesgue_norm(f, 4.0);
  for (double s : {0.0, 0.5, 2.0})
    CHECK(besov_seminorm(f, {s, 4.0, 2.0, true}) == doctest::Approx(std::pow(8.0, s) * l4).epsilon(1e-12));
  // The DC mode is not part of the homogeneous seminorm.
  const auto shifted = f + GridField::constant(g, 5.0);
  CHECK(besov_seminorm(shifted, {1.0, 2.0, 2.0, true}) == doctest::Approx(besov_seminorm(f, {1.0, 2.0, 2.0, true})));
}

TEST_CASE("Sobolev norm at s = 0 is the L^p norm") {
  const auto g = make_grid(1, 256, 30.0);
  const auto f = gaussian_profile(g, 2.0);
  CHECK(sobolev_norm(f, 0.0, 3.0) == doctest::Approx(lebesgue_norm(f, 3.0)).epsilon(1e-12));
  const auto mode = GridField::from_function(g, [&](const Frequency& x) { return std::sin(4 * g.frequency_unit() * x[0]); });
  const double xi = 4 * g.frequency_unit();
  CHECK(sobolev_norm(mode, 1.0, 2.0) == doctest::Approx(std::sqrt(1 + xi * xi) * lebesgue_norm(mode, 2.0)).epsilon(1e-12));
}

TEST_CASE("problem exponents") {
  const auto pp = ProblemParams::make(1, 4.0, 5.0, 9);
  CHECK(pp.beta == 0.0);
  CHECK(pp.fujita == doctest::Approx(9.0));
  CHECK(pp.sigma2 == doctest::Approx(4.0));
  CHECK(pp.eps == doctest::Approx(0.05 * 3.0));
  CHECK(pp.sigma1 == doctest::Approx(1.15));
  CHECK(pp.eta == doctest::Approx(2.0 + 0.5 * (9.0 / 4.0 - 0.5)));

  const auto p3 = ProblemParams::make(3, 3.0, 1.0, 3);
  CHECK(p3.beta == doctest::Approx(2.0 * (0.5 - 1.0 / 3.0)));
  CHECK(p3.sigma2 == doctest::Approx(2.0));  // 2n / (p(n - 2s)) < r
  CHECK_THROWS_AS(ProblemParams::make(3, 3.0, 0.5, 3), std::invalid_argument);

  CHECK_THROWS_AS(ProblemParams::make(1, 2.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(ProblemParams::make(1, 4.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(ProblemParams::make(0, 4.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("X and Y profiles scale linearly") {
  const auto g = make_grid(1, 256, 40.0);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 3);
  const auto f = random_power_law(g, 1.0, g.frequency_unit(), 2.0, 5);
  const Trajectory traj({0.0, 1.0, 2.0}, {f, f * 0.5, f * 0.25});
  const auto x1 = x_profile(traj, pp);
  const auto x3 = x_profile(traj.scaled(3.0), pp);
  for (std::size_t i = 0; i < x1.size(); ++i) CHECK(x3[i] == doctest::Approx(3.0 * x1[i]));
  CHECK(x_norm(traj, pp) == doctest::Approx(*std::max_element(x1.begin(), x1.end())));
  CHECK(y_norm(traj.scaled(2.0), pp) == doctest::Approx(2.0 * y_norm(traj, pp)));
  const auto gam = gamma_grid(pp, 4);
  CHECK(gam.size() == 6);
  CHECK(gam.front() == doctest::Approx(pp.sigma1));
  CHECK(gam.back() == doctest::Approx(pp.sigma2));
}

TEST_CASE("interpolation check rejects tuples off the scaling line") {
  const auto g = make_grid(1, 256, 40.0);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 3);
  const auto f = random_power_law(g, 1.0, g.frequency_unit(), 3.0, 9);
  // theta = 0.2: n/q - alpha = 0.8 / 4 + 0.2 (1/2 - 2) = -0.1, alpha = 0.3 -> q = 5
  const double ratio = interpolation_check(f, pp, 5.0, 0.3, 0.2);
  CHECK(std::isfinite(ratio));
  CHECK(ratio > 0.0);
  CHECK_THROWS_AS(interpolation_check(f, pp, 4.0, 0.3, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(interpolation_check(f, pp, 2.5, 0.5, 0.2), std::invalid_argument);  // alpha > theta s
  CHECK_THROWS_AS(interpolation_check(f, pp, 5.0, 0.3, 1.5), std::invalid_argument);
}

TEST_CASE("trajectories require matching sizes") {
  const auto g = make_grid(1, 16, 1.0);
  CHECK_THROWS(Trajectory({0.0, 1.0}, {GridField::zeros(g)}));
}
