#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "bwl/propagator.hpp"
#include "bwl/random_fields.hpp"
#include "doctest.h"

using namespace bwl;

namespace {

// v'' + v' + xi^2 v = 0, v(0) = 0, v'(0) = 1 integrated with an adaptive
// Dormand-Prince stepper.
double ode_solution(double t, double xi) {
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  State y{0.0, 1.0};
  auto rhs = [xi](const State& s, State& d, double) {
    d[0] = s[1];
    d[1] = -s[1] - xi * xi * s[0];
  };
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, y, 0.0,
                             t, 1e-3);
  return y[0];
}

}  // namespace

TEST_CASE("damped symbol solves the mode equation") {
  for (double xi : {0.0, 0.2, 0.499, 0.4999995, 0.5, 0.5000004, 0.501, 0.9, 4.0})
    for (double t : {0.1, 1.0, 5.0, 20.0}) {
      const double expect = ode_solution(t, xi);
      CHECK(std::abs(damped_symbol(t, xi) - expect) < 1e-10);
    }
}

TEST_CASE("mode residual by central differences") {
  const double h = 1e-4;
  for (double xi : {0.0, 0.5 - 1e-3, 0.5, 0.5 + 1e-3, 4.0})
    for (double t : {0.3, 2.0, 7.5}) {
      const double v = damped_symbol(t, xi);
      const double vp = (damped_symbol(t + h, xi) - damped_symbol(t - h, xi)) / (2 * h);
      const double vpp = (damped_symbol(t + h, xi) - 2 * v + damped_symbol(t - h, xi)) / (h * h);
      CHECK(std::abs(vpp + vp + xi * xi * v) < 1e-6);
      CHECK(std::abs(damped_symbol_dt(t, xi) - vp) < 1e-6);  // O(h^2) difference error
    }
}

TEST_CASE("symbol is continuous across the series band") {
  for (double edge : {0.5 - kBandHalfwidth, 0.5 + kBandHalfwidth})
    for (double t : {0.5, 3.0, 30.0}) {
      const double a = damped_symbol(t, edge * (1 - 1e-12));
      const double b = damped_symbol(t, edge * (1 + 1e-12));
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
  CHECK(symbol_L(2.0, 0.5) == doctest::Approx(2.0));
  CHECK(symbol_dtL(0.0, 3.0) == doctest::Approx(1.0));
}

TEST_CASE("damped symbol stays finite where L overflows") {
  const double t = 2000.0;
  CHECK(std::isinf(symbol_L(t, 0.0)) == true);
  CHECK(damped_symbol(t, 0.0) == doctest::Approx(1.0));  // (1 - e^{-t}) at xi = 0
  CHECK(std::isfinite(damped_symbol(t, 1e-3)));
}

TEST_CASE("flow acts on a lattice mode through its symbol") {
  const auto g = make_grid(1, 128, 40.0);
  const double xi = 7 * g.frequency_unit();
  const auto f = GridField::from_function(g, [&](const Frequency& x) { return std::cos(xi * x[0]); });
  for (double t : {0.0, 1.5, 12.0}) {
    const auto d = apply_D(t, f);
    const auto dd = apply_dtD(t, f);
    for (std::size_t i = 0; i < f.size(); i += 9) {
      CHECK(d[i] == doctest::Approx(damped_symbol(t, xi) * f[i]).scale(1.0).epsilon(1e-12));
      CHECK(dd[i] == doctest::Approx(damped_symbol_dt(t, xi) * f[i]).scale(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("linear solution takes the initial data") {
  const auto g = make_grid(1, 128, 40.0);
  const auto u0 = gaussian_profile(g, 2.0);
  const auto u1 = gaussian_profile(g, 1.0, 0.5);
  const auto at0 = linear_solution(u0, u1, 0.0);
  const auto v0 = linear_solution_dt(u0, u1, 0.0);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    CHECK(at0[i] == doctest::Approx(u0[i]).scale(1.0).epsilon(1e-12));
    CHECK(v0[i] == doctest::Approx(u1[i]).scale(1.0).epsilon(1e-12));
  }
  const double h = 1e-5, t = 1.3;
  const auto a = linear_solution(u0, u1, t + h), b = linear_solution(u0, u1, t - h);
  const auto dv = linear_solution_dt(u0, u1, t);
  for (std::size_t i = 0; i < u0.size(); i += 7) CHECK((a[i] - b[i]) / (2 * h) == doctest::Approx(dv[i]).scale(1.0).epsilon(1e-7));
}

TEST_CASE("growth fit recovers a synthetic log-correction") {
  std::vector<double> t, norms;
  for (double s = 1.0; s <= 30.0; s += 0.5) {
    t.push_back(s);
    norms.push_back(2.0 * std::exp(-0.5 * s) * std::pow(std::sqrt(1 + s * s), 0.75));
  }
  const auto fit = fit_high_frequency_growth(t, norms);
  CHECK(fit.linear_rate == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(fit.delta == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(fit.max_residual < 1e-10);
}

TEST_CASE("Lp-Lq verification rejects exponents outside its range") {
  const auto g = make_grid(1, 256, 64.0);
  const auto f = gaussian_profile(g, 2.0);
  LpLqOptions o;
  o.times = {1.0, 10.0, 100.0};
  o.p = 1.0;
  o.q = 1.0;
  CHECK_THROWS_AS(verify_lp_lq(f, o), std::invalid_argument);
  o.p = 2.0;
  o.q = 4.0;
  CHECK_THROWS_AS(verify_lp_lq(f, o), std::invalid_argument);
  o.q = 1.0;
  o.s1 = -1.0;
  CHECK_THROWS_AS(verify_lp_lq(f, o), std::invalid_argument);
}

TEST_CASE("Lp-Lq rate for Gaussian data from L^1") {
  const auto g = make_grid(1, 8192, 2048.0);
  LpLqOptions o;
  o.p = 2.0;
  o.q = 1.0;
  o.besov = false;
  for (double t = 0.1; t < 400.0; t *= 1.15) o.times.push_back(t);
  o.times.push_back(400.0);
  o.fit_window = std::make_pair(50.0, 400.0);
  const auto rep = verify_lp_lq(gaussian_profile(g, 2.0), o);
  CHECK(rep.scalar("expected_low_exponent") == doctest::Approx(-0.25));
  CHECK(rep.scalar("fitted_low_exponent") == doctest::Approx(-0.25).epsilon(0.05));
  CHECK(rep.scalar("max_ratio") < 1.0);
  CHECK(rep.tables.at("lplq").rows.size() == o.times.size());
}

TEST_CASE("block estimate ratios do not depend on the block index") {
  const auto g = make_grid(1, 8192, 1024.0);
  const auto f = gaussian_profile(g, 0.25);
  BlockEstimateOptions o;
  for (double t = 0.01; t < 1000; t *= 1.4) o.times.push_back(t);
  double lo = 1e300, hi = 0;
  for (int k : {1, 2, 3}) {
    const auto r = verify_block_estimate(f, k, o);
    CHECK(r.high);
    lo = std::min(lo, r.max_ratio);
    hi = std::max(hi, r.max_ratio);
  }
  CHECK(hi / lo < 3.0);
}
