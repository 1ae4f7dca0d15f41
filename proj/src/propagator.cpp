#include "bwl/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bwl/fit.hpp"
#include "bwl/littlewood_paley.hpp"
#include "bwl/norms.hpp"

namespace bwl {

namespace {

// Past t sqrt|kappa| = 4 the closed forms are accurate again and the series
// would need many terms.
constexpr double kSeriesReach = 4.0;

struct Branch {
  enum Kind { Sinh, Sin, Series } kind;
  double kappa;  // |xi|^2 - 1/4
  double root;   // sqrt|kappa|
};

Branch classify(double t, double xi_abs) {
  const double kappa = (xi_abs - 0.5) * (xi_abs + 0.5);
  const double root = std::sqrt(std::abs(kappa));
  if (std::abs(xi_abs - 0.5) <= kBandHalfwidth && t * root <= kSeriesReach)
    return {Branch::Series, kappa, root};
  return {kappa < 0.0 ? Branch::Sinh : Branch::Sin, kappa, root};
}

// sum_m (-kappa)^m t^(2m+1) / (2m+1)!  and  sum_m (-kappa)^m t^(2m) / (2m)!
std::pair<double, double> band_series(double t, double kappa) {
  const double x = -kappa * t * t;
  double odd_term = t, odd_sum = t;
  double even_term = 1.0, even_sum = 1.0;
  for (int m = 0; m < 400; ++m) {
    odd_term *= x / ((2.0 * m + 2.0) * (2.0 * m + 3.0));
    even_term *= x / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
    odd_sum += odd_term;
    even_sum += even_term;
    if (m >= 8 && std::abs(odd_term) <= 1e-17 * std::abs(odd_sum) &&
        std::abs(even_term) <= 1e-17 * std::abs(even_sum))
      break;
  }
  return {odd_sum, even_sum};
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("propagator: time must be >= 0");
}

}  // namespace

double symbol_L(double t, double xi_abs) {
  require_time(t);
  const Branch b = classify(t, xi_abs);
  switch (b.kind) {
    case Branch::Sinh: return std::sinh(t * b.root) / b.root;
    case Branch::Sin: return std::sin(t * b.root) / b.root;
    case Branch::Series: return band_series(t, b.kappa).first;
  }
  return 0.0;
}

double symbol_dtL(double t, double xi_abs) {
  require_time(t);
  const Branch b = classify(t, xi_abs);
  switch (b.kind) {
    case Branch::Sinh: return std::cosh(t * b.root);
    case Branch::Sin: return std::cos(t * b.root);
    case Branch::Series: return band_series(t, b.kappa).second;
  }
  return 0.0;
}

double damped_symbol(double t, double xi_abs) {
  require_time(t);
  const Branch b = classify(t, xi_abs);
  switch (b.kind) {
    case Branch::Sinh: {
      // exp(-t/2) sinh(t a) / a = exp(-t c) (1 - exp(-2 t a)) / (2a), c = 1/2 - a.
      const double a = b.root;
      const double c = xi_abs * xi_abs / (0.5 + a);
      return -std::exp(-t * c) * std::expm1(-2.0 * t * a) / (2.0 * a);
    }
    case Branch::Sin: return std::exp(-0.5 * t) * std::sin(t * b.root) / b.root;
    case Branch::Series: return std::exp(-0.5 * t) * band_series(t, b.kappa).first;
  }
  return 0.0;
}

double damped_symbol_dt(double t, double xi_abs) {
  require_time(t);
  const Branch b = classify(t, xi_abs);
  switch (b.kind) {
    case Branch::Sinh: {
      const double a = b.root;
      const double c = xi_abs * xi_abs / (0.5 + a);
      const double e = 0.5 + a;
      return (e * std::exp(-t * e) - c * std::exp(-t * c)) / (2.0 * a);
    }
    case Branch::Sin: {
      const double w = b.root;
      return std::exp(-0.5 * t) * (std::cos(t * w) - 0.5 * std::sin(t * w) / w);
    }
    case Branch::Series: {
      auto [l, lt] = band_series(t, b.kappa);
      return std::exp(-0.5 * t) * (lt - 0.5 * l);
    }
  }
  return 0.0;
}

GridField apply_D(double t, const GridField& g) {
  require_time(t);
  return apply_radial_multiplier([t](double r) { return damped_symbol(t, r); }, g);
}

GridField apply_dtD(double t, const GridField& g) {
  require_time(t);
  return apply_radial_multiplier([t](double r) { return damped_symbol_dt(t, r); }, g);
}

GridField linear_solution(const GridField& u0, const GridField& u1, double t) {
  if (!(u0.grid() == u1.grid())) throw std::invalid_argument("linear_solution: grid mismatch");
  require_time(t);
  if (t == 0.0) return u0;
  const TorusGrid& grid = u0.grid();
  auto d = sample_radial(grid, [t](double r) { return damped_symbol(t, r); });
  auto dd = sample_radial(grid, [t](double r) { return damped_symbol_dt(t, r); });
  auto s0 = u0.half_spectrum();
  auto s1 = u1.half_spectrum();
  std::vector<Complex> out(s0.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (d[i] + dd[i]) * s0[i] + d[i] * s1[i];
  return GridField::from_half_spectrum(grid, out);
}

GridField linear_solution_dt(const GridField& u0, const GridField& u1, double t) {
  if (!(u0.grid() == u1.grid())) throw std::invalid_argument("linear_solution_dt: grid mismatch");
  require_time(t);
  const TorusGrid& grid = u0.grid();
  auto abs_freq = grid.half_abs_frequency();
  auto s0 = u0.half_spectrum();
  auto s1 = u1.half_spectrum();
  std::vector<Complex> out(s0.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = abs_freq[i];
    out[i] = damped_symbol_dt(t, r) * s1[i] - r * r * damped_symbol(t, r) * s0[i];
  }
  return GridField::from_half_spectrum(grid, out);
}

// ---------------------------------------------------------------------------

namespace {

double beta_for(int n, double p) { return (n - 1) * std::abs(0.5 - 1.0 / p); }

void validate_lplq(double p, double q, double s1, double s2) {
  if (!(q >= 1.0) || !(q <= p) || std::isinf(p)) throw std::invalid_argument("L^p-L^q: need 1 <= q <= p < inf");
  if (p == 1.0) throw std::invalid_argument("L^p-L^q: p = 1 is excluded");
  if (s1 < s2) throw std::invalid_argument("L^p-L^q: need s1 >= s2");
}

}  // namespace

HighFrequencyGrowth fit_high_frequency_growth(const std::vector<double>& t,
                                              const std::vector<double>& norms) {
  // Least squares for y = c + a t + delta log<t> via the 3x3 normal equations.
  std::vector<std::array<double, 3>> rows;
  std::vector<double> y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(norms[i] > 0.0)) continue;
    rows.push_back({1.0, t[i], std::log(japanese(t[i]))});
    y.push_back(std::log(norms[i]) + 0.5 * t[i]);
  }
  if (rows.size() < 3) throw std::invalid_argument("fit_high_frequency_growth: need three samples");
  double m[3][4] = {};
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] += rows[k][i] * rows[k][j];
      m[i][3] += rows[k][i] * y[k];
    }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    for (int j = 0; j < 4; ++j) std::swap(m[c][j], m[piv][j]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int j = 0; j < 4; ++j) m[r][j] -= f * m[c][j];
    }
  }
  const double coef[3] = {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
  HighFrequencyGrowth g;
  g.linear_rate = coef[1];
  g.delta = coef[2];
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double fit = coef[0] + coef[1] * rows[k][1] + coef[2] * rows[k][2];
    g.max_residual = std::max(g.max_residual, std::abs(y[k] - fit));
  }
  return g;
}

ExperimentReport verify_lp_lq(const GridField& g, const LpLqOptions& o) {
  validate_lplq(o.p, o.q, o.s1, o.s2);
  if (o.times.empty()) throw std::invalid_argument("verify_lp_lq: empty time grid");
  const TorusGrid& grid = g.grid();
  const auto& blocks = *DyadicBlocks::for_grid(grid);
  const int n = grid.dim();
  const double beta = beta_for(n, o.p);
  const double rate = 0.5 * n * (1.0 / o.q - 1.0 / o.p) + 0.5 * (o.s1 - o.s2);

  const GridField g_low = project(blocks, g, LowPass{1.0});
  const GridField g_high = project(blocks, g, HighPass{1.0});

  auto norm_at = [&](const GridField& f, double smooth, double expo) {
    return o.besov ? besov_seminorm(f, {smooth, expo, 2.0, true}, blocks) : sobolev_norm(f, smooth, expo);
  };
  // Lebesgue variant: L^q for the low part, H^{beta-1}_p for the high part.
  const double low_data = o.besov ? norm_at(g_low, o.s2, o.q) : lebesgue_norm(g_low, o.q);
  const double high_data = norm_at(g_high, o.s1 + beta - 1.0, o.p);
  auto measure = [&](const GridField& f) {
    return o.besov ? besov_seminorm(f, {o.s1, o.p, 2.0, true}, blocks) : lebesgue_norm(f, o.p);
  };

  std::vector<double> lhs, low_meas, high_meas;
  for (double t : o.times) {
    lhs.push_back(measure(apply_D(t, g)));
    low_meas.push_back(measure(apply_D(t, g_low)));
    high_meas.push_back(measure(apply_D(t, g_high)));
  }

  ExperimentReport rep;
  rep.kind = "verify-lp-lq";
  const auto window = o.fit_window.value_or(last_decade(o.times));
  rep.scalars["expected_low_exponent"] = -rate;
  rep.scalars["fit_window_lo"] = window.first;
  rep.scalars["fit_window_hi"] = window.second;
  auto try_fit = [&](const std::vector<double>& v) {
    try {
      return fit_decay_exponent(o.times, v, window.first, window.second).slope;
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  rep.scalars["fitted_low_exponent"] = try_fit(low_meas);
  rep.scalars["fitted_lhs_exponent"] = try_fit(lhs);

  // delta: growth exponent of exp(t/2) ||D(t) g_high|| / data, never negative.
  double delta = 0.0;
  if (high_data > 0.0) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < o.times.size(); ++i) {
      if (!(high_meas[i] > 0.0)) continue;
      lx.push_back(std::log(japanese(o.times[i])));
      ly.push_back(std::log(high_meas[i] / high_data) + 0.5 * o.times[i]);
    }
    if (lx.size() >= 2) delta = std::max(0.0, fit_line(lx, ly).slope);
  }
  rep.scalars["fitted_delta"] = delta;
  rep.scalars["low_data_norm"] = low_data;
  rep.scalars["high_data_norm"] = high_data;
  rep.scalars["beta"] = beta;

  Table table{{"t", "lhs", "low_measured", "high_measured", "low_bound", "high_bound", "ratio"}, {}};
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < o.times.size(); ++i) {
    const double t = o.times[i];
    const double lb = std::pow(japanese(t), -rate) * low_data;
    const double hb = std::exp(-0.5 * t) * std::pow(japanese(t), delta) * high_data;
    const double ratio = (lb + hb) > 0.0 ? lhs[i] / (lb + hb) : 0.0;
    max_ratio = std::max(max_ratio, ratio);
    table.add_row({t, lhs[i], low_meas[i], high_meas[i], lb, hb, ratio});
  }
  rep.scalars["max_ratio"] = max_ratio;
  rep.tables["lplq"] = std::move(table);
  return rep;
}

BlockEstimateReport verify_block_estimate(const GridField& g, int k, const BlockEstimateOptions& o) {
  validate_lplq(o.p, o.q, o.s1, o.s2);
  if (o.times.empty()) throw std::invalid_argument("verify_block_estimate: empty time grid");
  const auto& blocks = *DyadicBlocks::for_grid(g.grid());
  if (!blocks.contains(k)) (void)blocks.block_symbol(k);  // throws out_of_range
  const int n = g.grid().dim();
  const double beta = beta_for(n, o.p);
  const double rate = 0.5 * n * (1.0 / o.q - 1.0 / o.p) + 0.5 * (o.s1 - o.s2);

  const GridField gk = project(blocks, g, Annulus{k});
  BlockEstimateReport rep;
  rep.k = k;
  rep.high = k > 0;
  rep.times = o.times;
  const double data = rep.high ? std::exp2(k * (o.s1 + beta - 1.0)) * lebesgue_norm(gk, o.p)
                               : std::exp2(k * o.s2) * lebesgue_norm(gk, o.q);
  // The block symbol and the flow are applied as one multiplier so that modes
  // outside the annulus stay exactly zero. High blocks (|xi| >= 1) use the
  // undamped L(t) and carry exp(-t/2) analytically.
  const auto block = blocks.block_symbol(k);
  const auto abs_freq = g.grid().half_abs_frequency();
  std::vector<double> sym(block.size());
  std::vector<double> growth;
  for (double t : o.times) {
    for (std::size_t i = 0; i < sym.size(); ++i)
      sym[i] = block[i] == 0.0 ? 0.0
                               : block[i] * (rep.high ? symbol_L(t, abs_freq[i]) : damped_symbol(t, abs_freq[i]));
    const double flow = std::exp2(k * o.s1) * lebesgue_norm(apply_sampled_multiplier(sym, g), o.p);
    const double damping = rep.high ? std::exp(-0.5 * t) : 1.0;
    const double shape = rep.high ? std::pow(japanese(t), o.delta) : std::pow(japanese(t), -rate);
    rep.lhs.push_back(damping * flow);
    rep.bound.push_back(damping * shape * data);
    rep.ratio.push_back(data > 0.0 ? flow / (shape * data) : 0.0);
    growth.push_back(rep.high && data > 0.0 ? flow / data : 0.0);
  }
  rep.max_ratio = *std::max_element(rep.ratio.begin(), rep.ratio.end());
  try {
    if (rep.high) {
      rep.fitted_exponent = fit_decay_exponent(o.times, growth, 0.0, o.times.back()).slope;
    } else {
      auto [lo, hi] = last_decade(o.times);
      rep.fitted_exponent = fit_decay_exponent(o.times, rep.lhs, lo, hi).slope;
    }
  } catch (const std::invalid_argument&) {
    rep.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace bwl
