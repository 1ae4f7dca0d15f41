#include "bwl/lab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "bwl/admissibility.hpp"
#include "bwl/fit.hpp"
#include "bwl/grid.hpp"
#include "bwl/lab/svg_plot.hpp"
#include "bwl/littlewood_paley.hpp"
#include "bwl/norms.hpp"
#include "bwl/parallel.hpp"
#include "bwl/paraproduct.hpp"
#include "bwl/propagator.hpp"
#include "bwl/random_fields.hpp"
#include "bwl/solver.hpp"
#include "json.hpp"

namespace bwl::lab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Context {
  Config& cfg;
  const RunOptions& opts;
  std::uint64_t seed = 0;
};

using Runner = std::function<ExperimentReport(Context&)>;

std::string str(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

// --- config sections shared by several kinds --------------------------------

TorusGrid read_grid(const Config& c) {
  const auto n = c.get_int("grid", "n", 1);
  const auto N = c.get_int("grid", "N", 4096);
  const double L = c.get_double("grid", "L", 400.0);
  if (n < 1 || n > 3) throw ConfigError("grid.n must be 1, 2 or 3");
  if (N < 8 || N % 2 != 0) throw ConfigError("grid.N must be even and >= 8");
  if (!(L > 0.0)) throw ConfigError("grid.L must be positive");
  return make_grid(static_cast<int>(n), static_cast<int>(N), L);
}

struct ProblemSpec {
  int n;
  double r, s;
  int p;
  std::optional<double> eps;
};

ProblemSpec read_problem(const Config& c, int n) {
  ProblemSpec ps{n, c.get_double("problem", "r", 4.0), c.get_double("problem", "s", 1.0), 0, {}};
  if (!(ps.r > 2.0) || !std::isfinite(ps.r))
    throw ConfigError("problem.r = " + str(ps.r) + " violates the domain r in (2, inf)");
  const double p = c.get_double("problem", "p", 2.0);
  if (p != std::floor(p) || p < 2.0) throw ConfigError("problem.p = " + str(p) + " must be an integer >= 2");
  ps.p = static_cast<int>(p);
  if (c.has("problem", "eps")) ps.eps = c.get_double("problem", "eps");
  return ps;
}

ProblemParams make_params(const ProblemSpec& ps) {
  try {
    return ProblemParams::make(ps.n, ps.r, ps.s, ps.p, ps.eps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

GridField read_profile(const Config& c, const TorusGrid& g, std::uint64_t seed) {
  const std::string kind = c.get_string("data", "profile", "gaussian");
  const double amp = c.get_double("data", "amplitude", 1.0);
  if (kind == "gaussian") return gaussian_profile(g, c.get_double("data", "width", 1.0), amp);
  if (kind == "slow-decay")
    return slow_decay_profile(g, c.get_double("data", "decay"),
                              c.get_double("data", "radius", g.box_length() / 8.0), amp);
  if (kind == "single-mode") {
    const auto k = c.get_list("data", "k");
    std::array<int, 3> kk{0, 0, 0};
    for (std::size_t i = 0; i < k.size() && i < 3; ++i) kk[i] = static_cast<int>(k[i]);
    return single_mode(g, kk, amp);
  }
  if (kind == "random")
    return random_power_law(g, c.get_double("data", "slope", 1.0),
                            c.get_double("data", "xi_lo", g.frequency_unit()),
                            c.get_double("data", "xi_hi", 0.25 * g.max_frequency()), seed) *
           amp;
  if (kind == "critical-low")
    return critical_low_frequency(g, c.get_double("data", "q", 1.0), c.get_double("data", "eps", 0.0), amp);
  throw ConfigError("data.profile: unknown profile '" + kind +
                    "' (gaussian, slow-decay, single-mode, random, critical-low)");
}

std::pair<GridField, GridField> read_data(const Config& c, const TorusGrid& g, std::uint64_t seed) {
  GridField u0 = read_profile(c, g, seed);
  const std::string v = c.get_string("data", "velocity", "zero");
  if (v == "zero") return {u0, GridField::zeros(g)};
  if (v == "same") return {u0, u0};
  throw ConfigError("data.velocity must be 'zero' or 'same'");
}

std::vector<double> read_times(const Config& c, const std::string& section, double T_default) {
  const double T = c.get_double(section, "T", T_default);
  const std::string kind = c.get_string(section, "time_grid", "uniform");
  if (!(T > 0.0)) throw ConfigError(section + ".T must be positive");
  if (kind == "uniform") {
    const auto steps = c.get_int(section, "steps", 100);
    if (steps < 1) throw ConfigError(section + ".steps must be positive");
    return uniform_time_grid(T, static_cast<int>(steps));
  }
  if (kind == "geometric") {
    const double t_first = c.get_double(section, "t_first", 0.1);
    const auto count = c.get_int(section, "count", 60);
    if (!(t_first > 0.0 && t_first < T) || count < 2) throw ConfigError(section + ": bad geometric grid");
    return geometric_time_grid(T, t_first, static_cast<int>(count));
  }
  throw ConfigError(section + ".time_grid must be 'uniform' or 'geometric'");
}

SolverConfig read_solver(const Config& c) {
  SolverConfig s;
  s.time_grid = read_times(c, "solver", 10.0);
  s.T = s.time_grid.back();
  s.picard_tol = c.get_double("solver", "picard_tol", s.picard_tol);
  s.max_iters = static_cast<int>(c.get_int("solver", "max_iters", s.max_iters));
  const std::string q = c.get_string("solver", "quadrature", "trapezoid");
  if (q == "trapezoid") s.quadrature = Quadrature::Trapezoid;
  else if (q == "gauss") s.quadrature = Quadrature::GaussPanels;
  else throw ConfigError("solver.quadrature must be 'trapezoid' or 'gauss'");
  s.gauss_order = static_cast<int>(c.get_int("solver", "gauss_order", s.gauss_order));
  s.gauss_panels = static_cast<int>(c.get_int("solver", "gauss_panels", s.gauss_panels));
  s.blowup_threshold = c.get_double("solver", "blowup_threshold", s.blowup_threshold);
  s.dealias_factor = static_cast<int>(c.get_int("solver", "dealias_factor", s.dealias_factor));
  s.nonlinearity = c.get_double("solver", "nonlinearity", s.nonlinearity);
  s.etd_dt = c.get_double("solver", "etd_dt", s.etd_dt);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  return s;
}

// Records the verdict in the report; throws unless overridden.
void admissibility_gate(const ProblemSpec& ps, bool global, const Context& ctx, ExperimentReport& rep) {
  const auto v = global ? check_gwp(ps.n, ps.r, ps.s, ps.p) : check_lwp(ps.n, ps.r, ps.s, ps.p);
  const bool pass = global ? v.gwp_pass() : v.lwp_pass();
  std::string failed;
  auto note = [&](const char* name, const ConditionResult& cr) {
    if (cr.status == Status::Fail) failed += std::string(failed.empty() ? "" : "; ") + name + ": " + cr.inequality;
  };
  note("(i)", v.condition_i);
  note("(ii)", v.condition_ii);
  note("(iii)", v.condition_iii);
  if (global) note("global threshold", v.gwp_threshold);
  rep.labels["admissibility"] = pass ? "pass" : (ctx.opts.override_admissibility ? "overridden" : "fail");
  if (v.ii_partial) rep.labels["admissibility_ii_partial"] = "true";
  if (!pass && !ctx.opts.override_admissibility)
    throw AdmissibilityFailure("parameters (n=" + std::to_string(ps.n) + ", r=" + str(ps.r) + ", s=" + str(ps.s) +
                               ", p=" + std::to_string(ps.p) + ") fail " + failed);
}

void merge(ExperimentReport& into, const ExperimentReport& from, const std::string& prefix = {}) {
  for (const auto& [k, v] : from.scalars) into.scalars[prefix + k] = v;
  for (const auto& [k, v] : from.labels) into.labels[prefix + k] = v;
  for (const auto& [k, v] : from.tables) into.tables[prefix + k] = v;
  for (const auto& v : from.verdicts) into.verdicts.push_back({prefix + v.name, v.pass, v.detail});
}

// --- kinds ---------------------------------------------------------------------

ExperimentReport run_partition(Context& ctx) {
  const auto g = read_grid(ctx.cfg);
  const double limit = ctx.cfg.get_double("partition", "tolerance", 1e-12);
  const DyadicBlocks blocks(g);
  ExperimentReport rep;
  const double res = partition_residual(blocks);
  rep.scalars["residual"] = res;
  rep.scalars["j_min"] = blocks.j_min();
  rep.scalars["j_max"] = blocks.j_max();
  rep.verdict("partition-of-unity", res < limit, str(res) + " < " + str(limit));
  return rep;
}

ExperimentReport run_lplq(Context& ctx) {
  auto& c = ctx.cfg;
  const auto g = read_grid(c);
  const GridField data = read_profile(c, g, ctx.seed);
  LpLqOptions o;
  o.p = c.get_double("lplq", "p", 2.0);
  o.q = c.get_double("lplq", "q", 1.0);
  o.s1 = c.get_double("lplq", "s1", 0.0);
  o.s2 = c.get_double("lplq", "s2", 0.0);
  o.besov = c.get_bool("lplq", "besov", false);
  o.times = read_times(c, "lplq", 500.0);
  if (c.has("lplq", "fit_lo") || c.has("lplq", "fit_hi"))
    o.fit_window = std::make_pair(c.get_double("lplq", "fit_lo"), c.get_double("lplq", "fit_hi"));
  const double tol = c.get_double("lplq", "tolerance", 0.1);
  ExperimentReport rep = verify_lp_lq(data, o);
  const double fitted = rep.scalar("fitted_low_exponent");
  const double expected = rep.scalar("expected_low_exponent");
  rep.verdict("low-frequency-exponent", std::abs(fitted - expected) <= tol * std::abs(expected),
              "fitted " + str(fitted) + " vs " + str(expected) + " within " + str(100 * tol) + "%");
  return rep;
}

ExperimentReport run_blocks(Context& ctx) {
  auto& c = ctx.cfg;
  const auto g = read_grid(c);
  const GridField data = read_profile(c, g, ctx.seed);
  BlockEstimateOptions o;
  o.p = c.get_double("block", "p", 2.0);
  o.q = c.get_double("block", "q", 1.0);
  o.s1 = c.get_double("block", "s1", 0.0);
  o.s2 = c.get_double("block", "s2", 0.0);
  o.delta = c.get_double("block", "delta", 0.0);
  o.times = read_times(c, "block", 100.0);
  const auto ks = c.get_list("block", "k", {-4, -3, -2, -1, 1, 2, 3, 4});
  const double limit = c.get_double("block", "spread_limit", 3.0);

  std::vector<BlockEstimateReport> out(ks.size());
  parallel_for(ks.size(), ctx.opts.jobs,
               [&](std::size_t i) { out[i] = verify_block_estimate(data, static_cast<int>(ks[i]), o); });

  ExperimentReport rep;
  Table table{{"k", "max_ratio", "fitted_exponent"}, {}};
  double lo_min = kInfinity, lo_max = 0, hi_min = kInfinity, hi_max = 0;
  for (const auto& b : out) {
    table.add_row({static_cast<double>(b.k), b.max_ratio, b.fitted_exponent});
    double& mn = b.high ? hi_min : lo_min;
    double& mx = b.high ? hi_max : lo_max;
    mn = std::min(mn, b.max_ratio);
    mx = std::max(mx, b.max_ratio);
  }
  rep.tables["blocks"] = std::move(table);
  auto spread = [&](const char* name, double lo, double hi) {
    if (!std::isfinite(lo)) return;
    const double sp = lo > 0 ? hi / lo : kInfinity;
    rep.scalars[std::string(name) + "_spread"] = sp;
    rep.verdict(std::string(name) + "-k-independence", sp < limit, "max/min ratio " + str(sp) + " < " + str(limit));
  };
  spread("low", lo_min, lo_max);
  spread("high", hi_min, hi_max);
  return rep;
}

ExperimentReport run_paraproduct(Context& ctx) {
  auto& c = ctx.cfg;
  const auto g = read_grid(c);
  const auto pairs = c.get_int("paraproduct", "pairs", 100);
  const double slope = c.get_double("paraproduct", "slope", 1.0);
  const double lo = c.get_double("paraproduct", "xi_lo", g.frequency_unit());
  const double hi = c.get_double("paraproduct", "xi_hi", 0.45 * g.max_frequency());
  if (pairs < 1) throw ConfigError("paraproduct.pairs must be positive");
  std::vector<double> res(static_cast<std::size_t>(pairs));
  parallel_for(res.size(), ctx.opts.jobs, [&](std::size_t i) {
    const auto f = random_power_law(g, slope, lo, hi, derive_seed(ctx.seed, 2 * i));
    const auto h = random_power_law(g, slope, lo, hi, derive_seed(ctx.seed, 2 * i + 1));
    res[i] = decomposition_residual(f, h);
  });
  ExperimentReport rep;
  Table table{{"pair", "residual"}, {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    table.add_row({static_cast<double>(i), res[i]});
    worst = std::max(worst, res[i]);
  }
  rep.tables["residuals"] = std::move(table);
  rep.scalars["max_residual"] = worst;
  rep.verdict("decomposition-identity", worst < kAliasingFlag, "max residual " + str(worst) + " < " + str(kAliasingFlag));
  return rep;
}

ExperimentReport run_leibniz(Context& ctx) {
  auto& c = ctx.cfg;
  const auto g = read_grid(c);
  LeibnizConfig lc;
  lc.alpha = c.get_double("leibniz", "alpha", lc.alpha);
  lc.r = c.get_double("leibniz", "r", lc.r);
  lc.p1 = c.get_double("leibniz", "p1", lc.p1);
  lc.p2 = c.get_double("leibniz", "p2", lc.p2);
  lc.q1 = c.get_double("leibniz", "q1", lc.q1);
  lc.q2 = c.get_double("leibniz", "q2", lc.q2);
  lc.ensemble_size = static_cast<int>(c.get_int("leibniz", "samples", lc.ensemble_size));
  lc.spectrum_slope = c.get_double("leibniz", "slope", lc.spectrum_slope);
  const double lo = c.get_double("leibniz", "xi_lo", g.frequency_unit());
  const double hi = c.get_double("leibniz", "xi_hi", 5.0);
  const double limit = c.get_double("leibniz", "change_limit", 0.25);
  try {
    lc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("leibniz: ") + e.what());
  }
  const auto coarse = leibniz_ensemble(g, lc, lo, hi, ctx.seed, ctx.opts.jobs);
  const auto fine = leibniz_ensemble(make_grid(g.dim(), 2 * g.points_per_axis(), g.box_length()), lc, lo, hi,
                                     ctx.seed, ctx.opts.jobs);
  ExperimentReport rep;
  rep.scalars["max_ratio"] = coarse.max_ratio;
  rep.scalars["mean_ratio"] = coarse.mean_ratio;
  rep.scalars["max_ratio_refined"] = fine.max_ratio;
  rep.scalars["mean_ratio_refined"] = fine.mean_ratio;
  rep.scalars["samples"] = coarse.samples;
  rep.scalars["undefined"] = coarse.undefined + fine.undefined;
  const double change = std::abs(fine.max_ratio - coarse.max_ratio) / coarse.max_ratio;
  rep.scalars["relative_change"] = change;
  const bool finite = std::isfinite(coarse.max_ratio) && std::isfinite(fine.max_ratio) && coarse.max_ratio > 0;
  rep.verdict("finite-ratio", finite, "max ratio " + str(coarse.max_ratio));
  rep.verdict("resolution-stable", finite && change < limit, "relative change " + str(change) + " < " + str(limit));
  return rep;
}

ExperimentReport run_contraction(Context& ctx) {
  auto& c = ctx.cfg;
  const auto g = read_grid(c);
  const auto ps = read_problem(c, g.dim());
  const SolverConfig base = read_solver(c);
  const auto amps = c.get_list("contraction", "amplitudes", {1e-3, 2e-3, 4e-3});
  const auto horizons = c.get_list("contraction", "horizons", {base.T});
  const auto [u0, u1] = read_data(c, g, ctx.seed);

  ExperimentReport gate;
  admissibility_gate(ps, false, ctx, gate);
  const auto pp = make_params(ps);

  std::vector<ContractionSample> runs;
  for (double T : horizons)
    for (double a : amps) runs.push_back({a, T, {}});
  parallel_for(runs.size(), ctx.opts.jobs, [&](std::size_t i) {
    SolverConfig sc = base;
    sc.time_grid = uniform_time_grid(runs[i].horizon, static_cast<int>(base.time_grid.size() - 1));
    sc.T = runs[i].horizon;
    const double scale = runs[i].amplitude / u0.max_abs();
    runs[i].diagnostics = picard_solve(u0 * scale, u1 * scale, pp, sc).diagnostics;
  });
  ExperimentReport rep = contraction_report(runs, pp);
  merge(rep, gate);
  return rep;
}

double max_relative_difference(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = lebesgue_norm(a[i], 2.0);
    if (den > 0.0) worst = std::max(worst, lebesgue_norm(a[i] - b[i], 2.0) / den);
  }
  return worst;
}

ExperimentReport run_solve(Context& ctx) {
  auto& c = ctx.cfg;
  const auto g = read_grid(c);
  const auto ps = read_problem(c, g.dim());
  const SolverConfig sc = read_solver(c);
  const bool assert_decay = c.get_bool("solve", "assert_decay", false);
  const bool etd_check = c.get_bool("solve", "etd_check", false);
  const double etd_tol = c.get_double("solve", "etd_tolerance", 1e-4);
  DecayOptions dopt;
  dopt.shell_limit = c.get_double("solve", "shell_limit", dopt.shell_limit);
  dopt.trend_limit = c.get_double("solve", "trend_limit", dopt.trend_limit);
  const auto [u0, u1] = read_data(c, g, ctx.seed);

  ExperimentReport gate;
  admissibility_gate(ps, assert_decay, ctx, gate);
  const auto pp = make_params(ps);

  const PicardResult res = picard_solve(u0, u1, pp, sc);
  const auto& d = res.diagnostics;
  ExperimentReport rep = contraction_report(d, pp, sc);
  merge(rep, gate);
  rep.scalars["quadrature_error"] = d.quadrature_error;
  rep.scalars["blew_up"] = d.blew_up ? 1.0 : 0.0;
  if (d.blew_up) rep.scalars["escape_time"] = d.escape_time;

  if (assert_decay || !d.blew_up) {
    dopt.blew_up = d.blew_up;
    merge(rep, decay_study(res.trajectory, pp, dopt));
  }
  if (etd_check && !d.blew_up) {
    EtdConfig ec;
    ec.dt = sc.etd_dt;
    ec.T = sc.T;
    ec.output_times = sc.time_grid;
    ec.blowup_threshold = sc.blowup_threshold;
    ec.nonlinearity = sc.nonlinearity;
    ec.dealias_factor = sc.dealias_factor;
    const EtdRun etd = etd_oracle(u0, u1, pp, ec);
    const bool same_nodes = !etd.blew_up && etd.trajectory.size() == res.trajectory.size();
    const double diff = same_nodes ? max_relative_difference(res.trajectory, etd.trajectory) : kInfinity;
    rep.scalars["etd_relative_difference"] = diff;
    rep.verdict("etd-agreement", diff <= etd_tol, "max relative L2 difference " + str(diff) + " <= " + str(etd_tol));
  }
  return rep;
}

ExperimentReport run_blowup(Context& ctx) {
  auto& c = ctx.cfg;
  const auto g = read_grid(c);
  const auto ps = read_problem(c, g.dim());
  const SolverConfig sc = read_solver(c);
  const std::string expect = c.get_string("probe", "expect", "any");
  if (expect != "any" && expect != "escape" && expect != "no-escape")
    throw ConfigError("probe.expect must be 'any', 'escape' or 'no-escape'");
  const auto [u0, u1] = read_data(c, g, ctx.seed);
  ExperimentReport gate;
  admissibility_gate(ps, false, ctx, gate);
  const auto pp = make_params(ps);
  ExperimentReport rep = blowup_probe(u0, u1, pp, sc);
  merge(rep, gate);
  if (expect != "any")
    rep.verdict("expected-outcome", rep.labels["outcome"] == expect,
                "outcome " + rep.labels["outcome"] + ", expected " + expect);
  return rep;
}

ExperimentReport run_sweep(Context& ctx) {
  auto& c = ctx.cfg;
  const auto g = read_grid(c);
  const auto base = read_problem(c, g.dim());
  const SolverConfig sc = read_solver(c);
  const auto ps_list = c.get_list("sweep", "p_values", {7, 8, 9, 10});
  const auto [u0, u1] = read_data(c, g, ctx.seed);
  DecayOptions dopt;
  dopt.shell_limit = c.get_double("sweep", "shell_limit", dopt.shell_limit);
  dopt.trend_limit = c.get_double("sweep", "trend_limit", dopt.trend_limit);

  ExperimentReport rep;
  std::vector<ProblemSpec> specs;
  for (double p : ps_list) {
    if (p != std::floor(p) || p < 2) throw ConfigError("sweep.p_values must be integers >= 2");
    ProblemSpec ps = base;
    ps.p = static_cast<int>(p);
    ExperimentReport gate;
    admissibility_gate(ps, false, ctx, gate);
    specs.push_back(ps);
  }

  struct Row {
    bool escaped = false;
    double escape_time = kNaN, trend = kNaN, x_sup = kNaN;
    bool decays = false;
    bool confined = true;
  };
  std::vector<Row> rows(specs.size());
  parallel_for(specs.size(), ctx.opts.jobs, [&](std::size_t i) {
    const auto pp = make_params(specs[i]);
    EtdConfig ec;
    ec.dt = sc.etd_dt;
    ec.T = sc.T;
    ec.output_times = sc.time_grid;
    ec.blowup_threshold = sc.blowup_threshold;
    ec.nonlinearity = sc.nonlinearity;
    ec.dealias_factor = sc.dealias_factor;
    const EtdRun run = etd_oracle(u0, u1, pp, ec);
    rows[i].escaped = run.blew_up;
    if (run.blew_up) {
      rows[i].escape_time = run.escape_time;
      return;
    }
    try {
      const auto d = decay_study(run.trajectory, pp, dopt);
      rows[i].trend = d.scalar("x_trend_slope");
      rows[i].x_sup = d.scalar("x_sup");
      rows[i].decays = d.all_pass();
    } catch (const ConfinementError&) {
      rows[i].confined = false;
    }
  });

  Table table{{"p", "fujita", "above_fujita", "escaped", "escape_time", "x_trend_slope", "x_sup", "decays"}, {}};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double fujita = 1.0 + 2.0 * specs[i].r / specs[i].n;
    table.add_row({static_cast<double>(specs[i].p), fujita, specs[i].p >= fujita - 1e-12 ? 1.0 : 0.0,
                   rows[i].escaped ? 1.0 : 0.0, rows[i].escape_time, rows[i].trend, rows[i].x_sup,
                   rows[i].decays ? 1.0 : 0.0});
    rep.labels["p" + std::to_string(specs[i].p)] =
        rows[i].escaped ? "escape" : !rows[i].confined ? "left-box" : rows[i].decays ? "bounded" : "growing";
  }
  rep.tables["sweep"] = std::move(table);
  rep.scalars["fujita"] = 1.0 + 2.0 * base.r / base.n;
  return rep;
}

ExperimentReport run_admissibility(Context& ctx) {
  auto& c = ctx.cfg;
  const auto n = c.get_int("problem", "n", 1);
  const auto ps = read_problem(c, static_cast<int>(n));
  const bool global = c.get_bool("admissibility", "global", false);
  const bool suggest = c.get_bool("admissibility", "suggest", false);
  ExperimentReport rep;
  const auto v = global ? check_gwp(ps.n, ps.r, ps.s, ps.p) : check_lwp(ps.n, ps.r, ps.s, ps.p);
  auto put = [&](const std::string& name, const ConditionResult& cr) {
    rep.labels[name] = to_string(cr.status);
    rep.labels[name + "_inequality"] = cr.inequality;
    rep.scalars[name + "_margin"] = cr.margin;
  };
  put("condition_i", v.condition_i);
  put("condition_ii", v.condition_ii);
  put("condition_iii", v.condition_iii);
  put("integer_p", v.integer_p);
  put("gwp_threshold", v.gwp_threshold);
  rep.labels["iii_disjunct"] = v.iii_disjunct;
  rep.labels["ii_partial"] = v.ii_partial ? "true" : "false";
  rep.scalars["beta"] = v.beta;
  rep.scalars["fujita"] = v.fujita;
  rep.scalars["two_s_ge_n"] = v.two_s_ge_n ? 1.0 : 0.0;
  const bool pass = global ? v.gwp_pass() : v.lwp_pass();
  rep.verdict(global ? "global-hypotheses" : "local-hypotheses", pass);
  const auto exact = exact_conditions(ps.n, ps.r, ps.s, ps.p);
  rep.verdict("exact-agreement", exact == flags_of(v), "rational re-evaluation of (i)-(iii) and the threshold");
  if (suggest) {
    const auto sg = suggest_s(ps.n, ps.r, ps.p);
    if (sg.s) rep.scalars["suggested_s"] = *sg.s;
    else rep.labels["suggest_binding"] = sg.binding;
  }
  return rep;
}

struct Kind {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Kind>& kinds() {
  static const std::vector<Kind> k{
      {{"partition", "residual of the dyadic partition of unity on a grid",
        "dyadic decomposition of unity"},
       run_partition},
      {{"verify-lp-lq", "decay of the linear flow from L^q to L^p against the low/high-frequency bound",
        "Lp-Lq estimate for the damped wave propagator"},
       run_lplq},
      {{"block-estimate", "per-block form of the Lp-Lq bound and its k-independence",
        "dyadic block estimates of the propagator"},
       run_blocks},
      {{"paraproduct-residual", "Bony decomposition identity on random band-limited pairs",
        "paraproduct decomposition of products"},
       run_paraproduct},
      {{"leibniz", "fractional Leibniz ratio over a random ensemble, stable under refinement",
        "fractional Leibniz rule in Besov spaces"},
       run_leibniz},
      {{"contraction", "Picard contraction ratio against data amplitude and horizon",
        "difference estimate of the Duhamel map"},
       run_contraction},
      {{"solve", "mild solution by Picard iteration with decay study and optional ETD cross-check",
        "local and global existence of mild solutions"},
       run_solve},
      {{"blowup-probe", "escape from an L-infinity cap at two resolutions", "Fujita exponent, subcritical case"},
       run_blowup},
      {{"sweep-critical", "escape-vs-decay verdicts across nonlinearity powers p",
        "Fujita critical exponent threshold"},
       run_sweep},
      {{"admissibility", "checks the hypothesis inequalities for (n, r, s, p)",
        "hypotheses of the existence theorems"},
       run_admissibility},
  };
  return k;
}

std::string timestamp_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::optional<LogLogPlot> plot_for(const std::string& name, const Table& table, const ExperimentReport& rep) {
  if (name == "lplq") {
    LogLogPlot plot{"linear flow norm against t", "t", {"lhs", "low_bound", "high_bound"}, {}};
    try {
      const auto t = table.column("t");
      const auto lhs = table.column("low_measured");
      const double lo = rep.scalar("fit_window_lo"), hi = rep.scalar("fit_window_hi");
      const auto f = fit_decay_exponent(t, lhs, lo, hi);
      plot.fit = FittedLine{f.slope, f.intercept, lo, hi, "fitted exponent " + str(f.slope)};
    } catch (const std::exception&) {
    }
    return plot;
  }
  if (name == "decay") return LogLogPlot{"solution norms against t", "t", {"besov_r", "besov_s", "x_profile"}, {}};
  if (name == "contraction") return LogLogPlot{"first contraction ratio", "amplitude", {"first_ratio"}, {}};
  if (name == "iterations") return LogLogPlot{"Picard differences", "iteration", {"difference"}, {}};
  return std::nullopt;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_outputs(const ExperimentReport& rep, const std::filesystem::path& dir, bool plots) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", to_json_string(rep));
  for (const auto& [name, table] : rep.tables) {
    write_text(dir / (name + ".csv"), to_csv(table));
    if (!plots) continue;
    if (auto plot = plot_for(name, table, rep)) write_text(dir / (name + ".svg"), render_loglog(table, *plot));
  }
}

std::string error_kind(int code) {
  switch (code) {
    case kExitConfig: return "config";
    case kExitAdmissibility: return "admissibility";
    case kExitBlowup: return "blowup";
    default: return "runtime";
  }
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& k : kinds()) v.push_back(k.info);
    return v;
  }();
  return infos;
}

std::string list_experiments() {
  std::ostringstream out;
  for (const auto& e : experiment_registry())
    out << e.name << std::string(e.name.size() < 22 ? 22 - e.name.size() : 1, ' ') << e.description << "  ["
        << e.anchor << "]\n";
  return out.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const AdmissibilityFailure*>(&e)) return kExitAdmissibility;
  if (dynamic_cast<const BlowupError*>(&e)) return kExitBlowup;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitConfig;
  return kExitOther;
}

ExperimentReport run_config(Config& cfg, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (opts.seed) cfg.set("experiment", "seed", std::to_string(*opts.seed));
  const std::string kind = cfg.get_string("experiment", "kind");
  const auto* entry = [&]() -> const Kind* {
    for (const auto& k : kinds())
      if (k.info.name == kind) return &k;
    return nullptr;
  }();
  if (!entry) throw ConfigError("experiment.kind: unknown kind '" + kind + "'");
  const auto seed = cfg.get_int("experiment", "seed", 1);
  if (seed < 0) throw ConfigError("experiment.seed must be nonnegative");
  Context ctx{cfg, opts, static_cast<std::uint64_t>(seed)};

  ExperimentReport rep = entry->run(ctx);
  cfg.check_consumed();
  rep.kind = kind;
  rep.config_hash = cfg.hash();
  rep.timestamp = timestamp_now();
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

RunResult run_file(const std::filesystem::path& config_path, const RunOptions& opts) {
  RunResult result;
  std::optional<Config> cfg;
  auto fail = [&](const std::exception& e) {
    result.exit_code = exit_code_for(e);
    result.error = e.what();
    std::cerr << "besov-wave-lab: " << error_kind(result.exit_code) << " error: " << result.error << "\n";
    if (result.out_dir.empty()) return;
    try {
      std::filesystem::create_directories(result.out_dir);
      nlohmann::ordered_json j{{"exit_code", result.exit_code},
                               {"error", error_kind(result.exit_code)},
                               {"message", result.error},
                               {"config", config_path.string()}};
      write_text(result.out_dir / "error.json", j.dump(2) + "\n");
    } catch (const std::exception&) {
    }
  };

  bool plots = true;
  try {
    cfg = Config::load(config_path);
    result.out_dir = opts.out_dir ? *opts.out_dir
                                  : std::filesystem::path(cfg->get_string(
                                        "output", "dir", (std::filesystem::path("out") / config_path.stem()).string()));
    plots = cfg->get_bool("output", "plots", true);
  } catch (const std::exception& e) {
    fail(e);
    return result;
  }
  try {
    ExperimentReport rep = run_config(*cfg, opts);
    write_outputs(rep, result.out_dir, plots);
    result.report = std::move(rep);
  } catch (const std::exception& e) {
    fail(e);
  }
  return result;
}

}  // namespace bwl::lab
