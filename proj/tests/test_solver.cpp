#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "bwl/propagator.hpp"
#include "bwl/random_fields.hpp"
#include "bwl/solver.hpp"
#include "doctest.h"

using namespace bwl;

namespace {

double rel_l2(const GridField& a, const GridField& b) { return lebesgue_norm(a - b, 2.0) / lebesgue_norm(b, 2.0); }

// u'' + u' = u^2, u(0) = a, u'(0) = 0.
double homogeneous_ode(double a, double T) {
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  State y{a, 0.0};
  auto rhs = [](const State& s, State& d, double) {
    d[0] = s[1];
    d[1] = -s[1] + s[0] * s[0];
  };
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, y, 0.0,
                             T, 1e-3);
  return y[0];
}

SolverConfig config(double T, int steps) {
  SolverConfig c;
  c.T = T;
  c.time_grid = uniform_time_grid(T, steps);
  return c;
}

}  // namespace

TEST_CASE("time grids") {
  const auto u = uniform_time_grid(2.0, 4);
  CHECK(u == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  const auto g = geometric_time_grid(100.0, 0.1, 4);
  CHECK(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g[1] == doctest::Approx(0.1));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.back() == 100.0);
  CHECK_THROWS(uniform_time_grid(0.0, 3));
  CHECK_THROWS(geometric_time_grid(1.0, 2.0, 4));
}

TEST_CASE("solver configuration validation") {
  auto c = config(1.0, 4);
  CHECK_NOTHROW(c.validate());
  c.time_grid = {0.0, 0.6, 0.5, 1.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = config(1.0, 4);
  c.quadrature = Quadrature::GaussPanels;
  c.gauss_order = 9;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = config(1.0, 4);
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("Duhamel integral of a time-independent source") {
  const auto g = make_grid(1, 64, 20.0);
  const double xi = 3 * g.frequency_unit();
  const auto mode = GridField::from_function(g, [&](const Frequency& x) { return std::cos(xi * x[0]); });
  const double t = 4.0;
  const double weight = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double s) { return damped_symbol(s, xi); }, 0.0, t, 10, 1e-14);
  const auto expect = mode * weight;

  auto c = config(t, 400);
  const Trajectory src(c.time_grid, std::vector<GridField>(c.time_grid.size(), mode));
  CHECK(rel_l2(duhamel_integral(src, t, c), expect) < 1e-5);

  auto cg = config(t, 8);
  cg.quadrature = Quadrature::GaussPanels;
  cg.gauss_order = 10;
  cg.gauss_panels = 2;
  const Trajectory srcg(cg.time_grid, std::vector<GridField>(cg.time_grid.size(), mode));
  CHECK(rel_l2(duhamel_integral(srcg, t, cg), expect) < 1e-12);
  CHECK_THROWS_AS(duhamel_integral(srcg, 2 * t, cg), std::invalid_argument);
}

TEST_CASE("without nonlinearity Picard returns the linear flow") {
  const auto g = make_grid(1, 128, 40.0);
  const auto u0 = gaussian_profile(g, 2.0, 0.3);
  const auto u1 = gaussian_profile(g, 1.0, 0.1);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 3);
  auto c = config(5.0, 20);
  c.nonlinearity = 0.0;
  const auto res = picard_solve(u0, u1, pp, c);
  CHECK(res.diagnostics.converged);
  CHECK(res.diagnostics.iterations == 1);
  for (std::size_t i = 0; i < res.trajectory.size(); ++i)
    CHECK(rel_l2(res.trajectory[i], linear_solution(u0, u1, res.trajectory.times()[i])) < 1e-13);
}

TEST_CASE("spatially constant data follows the ODE") {
  const auto g = make_grid(1, 16, 10.0);
  const double a = 0.4, T = 2.0;
  const double expect = homogeneous_ode(a, T);
  const auto u0 = GridField::constant(g, a);
  const auto u1 = GridField::zeros(g);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 2);

  EtdConfig e;
  e.dt = 1e-3;
  e.T = T;
  e.output_times = {T};
  const auto etd = etd_oracle(u0, u1, pp, e);
  CHECK(etd.trajectory[etd.trajectory.size() - 1][0] == doctest::Approx(expect).epsilon(1e-6));

  auto c = config(T, 16);
  c.quadrature = Quadrature::GaussPanels;
  c.gauss_order = 10;
  c.picard_tol = 1e-13;
  const auto pic = picard_solve(u0, u1, pp, c);
  CHECK(pic.diagnostics.converged);
  CHECK(pic.diagnostics.iterations > 2);  // the mean is not visible to the X norm alone
  CHECK(pic.trajectory[pic.trajectory.size() - 1][0] == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("Picard and ETD agree on a nonlinear run") {
  const auto g = make_grid(1, 256, 60.0);
  const auto u0 = gaussian_profile(g, 2.0, 0.5);
  const auto u1 = GridField::zeros(g);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 3);
  auto c = config(4.0, 40);
  c.quadrature = Quadrature::GaussPanels;
  c.gauss_order = 8;
  c.picard_tol = 1e-12;
  const auto pic = picard_solve(u0, u1, pp, c);
  CHECK(pic.diagnostics.converged);
  CHECK(pic.diagnostics.residual < 1e-10);
  CHECK_FALSE(pic.diagnostics.non_contracting);

  EtdConfig e;
  e.dt = 0.002;
  e.T = 4.0;
  e.output_times = c.time_grid;
  const auto etd = etd_oracle(u0, u1, pp, e);
  REQUIRE(etd.trajectory.size() == pic.trajectory.size());
  for (std::size_t i = 1; i < etd.trajectory.size(); ++i) CHECK(rel_l2(etd.trajectory[i], pic.trajectory[i]) < 1e-6);
}

TEST_CASE("ETD converges at second order") {
  const auto g = make_grid(1, 128, 40.0);
  const auto u0 = gaussian_profile(g, 1.5, 0.8);
  const auto u1 = gaussian_profile(g, 1.5, 0.2);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 2);
  auto run = [&](double dt) {
    EtdConfig e;
    e.dt = dt;
    e.T = 2.0;
    e.output_times = {2.0};
    const auto r = etd_oracle(u0, u1, pp, e);
    return r.trajectory[r.trajectory.size() - 1];
  };
  const auto ref = run(0.1 / 64);
  const double e1 = lebesgue_norm(run(0.1) - ref, 2.0);
  const double e2 = lebesgue_norm(run(0.05) - ref, 2.0);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("contraction ratio scales like amplitude^(p-1)") {
  const auto g = make_grid(1, 256, 60.0);
  const auto shape = gaussian_profile(g, 2.0);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 3);
  auto c = config(5.0, 50);
  c.max_iters = 3;
  c.picard_tol = 1e-30;
  std::vector<ContractionSample> runs;
  for (double a : {0.01, 0.02, 0.04}) {
    runs.push_back({a, c.T, picard_solve(shape * a, GridField::zeros(g), pp, c).diagnostics});
    CHECK(runs.back().diagnostics.differences.size() == 3);
  }
  const auto rep = contraction_report(runs, pp);
  CHECK(rep.scalar("fitted_amplitude_slope") == doctest::Approx(2.0).epsilon(0.05));
  CHECK(rep.all_pass());
}

TEST_CASE("blow-up is detected and reported") {
  const auto g = make_grid(1, 128, 60.0);
  const auto u0 = gaussian_profile(g, 4.0, 2.0);
  const auto u1 = GridField::zeros(g);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 2);
  auto c = config(10.0, 10);
  c.blowup_threshold = 50.0;
  c.etd_dt = 0.01;
  const auto rep = blowup_probe(u0, u1, pp, c);
  CHECK(rep.scalar("escaped") == 1.0);
  CHECK(rep.scalar("escape_time") < 10.0);
  CHECK(rep.labels.at("outcome") == "escape");

  c.blowup_threshold = 1.0;
  CHECK_THROWS_AS(picard_solve(u0, u1, pp, c), std::invalid_argument);

  const Trajectory traj({0.0, 1.0}, {u0, u0});
  DecayOptions opts;
  opts.blew_up = true;
  CHECK_THROWS_AS(decay_study(traj, pp, opts), BlowupError);
}

TEST_CASE("decay study flags fields reaching the box edge") {
  const auto g = make_grid(1, 128, 20.0);
  const auto wide = gaussian_profile(g, 6.0);
  const auto pp = ProblemParams::make(1, 4.0, 2.0, 3);
  const Trajectory traj({0.0, 1.0, 10.0}, {wide, wide, wide});
  CHECK_THROWS_AS(decay_study(traj, pp), ConfinementError);

  const auto roomy = make_grid(1, 512, 80.0);
  const auto narrow = gaussian_profile(roomy, 0.8);
  const Trajectory ok({0.0, 1.0, 10.0}, {narrow, apply_D(1.0, narrow), apply_D(10.0, narrow)});
  const auto rep = decay_study(ok, pp);
  CHECK(rep.tables.at("decay").rows.size() == 3);
  CHECK(rep.scalar("max_shell_fraction") < 1e-6);
}
