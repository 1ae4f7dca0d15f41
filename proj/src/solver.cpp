#include "bwl/solver.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "bwl/fft.hpp"
#include "bwl/fit.hpp"
#include "bwl/propagator.hpp"

namespace bwl {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

using Spectrum = std::vector<Complex>;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
};

template <unsigned N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  GaussRule rule;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      rule.x.push_back(0.0);
      rule.w.push_back(w[i]);
      continue;
    }
    rule.x.push_back(-a[i]);
    rule.w.push_back(w[i]);
    rule.x.push_back(a[i]);
    rule.w.push_back(w[i]);
  }
  return rule;
}

const GaussRule& gauss_rule(int order) {
  static const std::map<int, GaussRule> rules = {
      {2, make_rule<2>()},  {3, make_rule<3>()},   {4, make_rule<4>()},   {5, make_rule<5>()},
      {6, make_rule<6>()},  {7, make_rule<7>()},   {8, make_rule<8>()},   {10, make_rule<10>()},
      {15, make_rule<15>()}, {20, make_rule<20>()}};
  auto it = rules.find(order);
  if (it == rules.end()) throw std::invalid_argument("unsupported Gauss-Legendre order " + std::to_string(order));
  return it->second;
}

std::vector<double> d_symbol(const TorusGrid& grid, double t) {
  return sample_radial(grid, [t](double r) { return damped_symbol(t, r); });
}

bool is_uniform(std::span<const double> t) {
  if (t.size() < 3) return true;
  const double h = t[1] - t[0];
  for (std::size_t i = 1; i + 1 < t.size(); ++i)
    if (std::abs((t[i + 1] - t[i]) - h) > 1e-12 * std::max(1.0, t.back())) return false;
  return true;
}

void axpy(Spectrum& acc, double w, std::span<const double> sym, std::span<const Complex> s) {
  for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += (w * sym[m]) * s[m];
}

// Composite trapezoid for I_i = int_0^{t_i} D(t_i - tau) S(tau) dtau at the
// requested node indices.
std::vector<Spectrum> duhamel_trapezoid(const TorusGrid& grid, std::span<const double> t,
                                        const std::vector<Spectrum>& src,
                                        const std::vector<std::size_t>& outputs) {
  const std::size_t hs = grid.half_size();
  std::vector<std::vector<double>> lags;
  const bool uniform = is_uniform(t);
  if (uniform && t.size() > 1) {
    std::size_t max_out = 0;
    for (auto i : outputs) max_out = std::max(max_out, i);
    const double h = t[1] - t[0];
    lags.resize(max_out + 1);
    for (std::size_t l = 1; l <= max_out; ++l) lags[l] = d_symbol(grid, h * static_cast<double>(l));
  }
  std::vector<Spectrum> out;
  out.reserve(outputs.size());
  for (std::size_t i : outputs) {
    Spectrum acc(hs, Complex{});
    for (std::size_t k = 0; k < i; ++k) {  // the k = i term carries D(0) = 0
      const double w = 0.5 * (t[k + 1] - (k == 0 ? t[0] : t[k - 1]));
      if (uniform) {
        axpy(acc, w, lags[i - k], src[k]);
      } else {
        axpy(acc, w, d_symbol(grid, t[i] - t[k]), src[k]);
      }
    }
    out.push_back(std::move(acc));
  }
  return out;
}

// Lagrange weights of the (up to) cubic interpolant through nodes first..first+count-1.
void lagrange(std::span<const double> t, std::size_t first, std::size_t count, double x, double* w) {
  for (std::size_t a = 0; a < count; ++a) {
    double v = 1.0;
    for (std::size_t b = 0; b < count; ++b)
      if (b != a) v *= (x - t[first + b]) / (t[first + a] - t[first + b]);
    w[a] = v;
  }
}

// Gauss-Legendre panels over [0, t_eval] split at the nodes; the source between
// nodes is the cubic interpolant of its spectra.
Spectrum panel_integral(const TorusGrid& grid, std::span<const double> t, const std::vector<Spectrum>& src,
                        double t_eval, int order, int panels) {
  const GaussRule& rule = gauss_rule(order);
  const std::size_t hs = grid.half_size();
  auto abs_freq = grid.half_abs_frequency();
  const std::size_t m = t.size();
  const std::size_t stencil = std::min<std::size_t>(4, m);
  Spectrum acc(hs, Complex{});
  Spectrum local(hs);
  for (std::size_t k = 0; k + 1 < m && t[k] < t_eval; ++k) {
    const std::size_t first = std::min<std::size_t>(k > 0 ? k - 1 : 0, m - stencil);
    const double width = (std::min(t[k + 1], t_eval) - t[k]) / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
      const double a = t[k] + pnl * width;
      for (std::size_t g = 0; g < rule.x.size(); ++g) {
        const double tau = a + 0.5 * width * (rule.x[g] + 1.0);
        const double wq = 0.5 * width * rule.w[g];
        double lw[4];
        lagrange(t, first, stencil, tau, lw);
        std::fill(local.begin(), local.end(), Complex{});
        for (std::size_t s = 0; s < stencil; ++s) {
          const auto& sp = src[first + s];
          for (std::size_t q = 0; q < hs; ++q) local[q] += lw[s] * sp[q];
        }
        const double lag = t_eval - tau;
        for (std::size_t q = 0; q < hs; ++q) acc[q] += (wq * damped_symbol(lag, abs_freq[q])) * local[q];
      }
    }
  }
  return acc;
}

std::vector<Spectrum> duhamel_at(const TorusGrid& grid, std::span<const double> t,
                                 const std::vector<Spectrum>& src, const std::vector<std::size_t>& outputs,
                                 const SolverConfig& cfg) {
  if (cfg.quadrature == Quadrature::Trapezoid) return duhamel_trapezoid(grid, t, src, outputs);
  std::vector<Spectrum> out;
  out.reserve(outputs.size());
  for (std::size_t i : outputs)
    out.push_back(panel_integral(grid, t, src, t[i], cfg.gauss_order, cfg.gauss_panels));
  return out;
}

// Raw half spectrum of c * u^p, computed on the padded grid.
Spectrum power_spectrum(const TorusGrid& grid, std::span<const Complex> half, int p, int pad, double c) {
  const int fine_n = pad * grid.points_per_axis();
  auto padded = fft::pad_half(grid, half, fine_n);
  std::vector<double> fine(static_cast<std::size_t>(std::pow(fine_n, grid.dim()) + 0.5));
  fft::c2r(grid.dim(), fine_n, padded, fine);
  const double inv = 1.0 / static_cast<double>(fine.size());
  for (double& v : fine) {
    const double x = v * inv;
    double acc = x;
    for (int i = 1; i < p; ++i) acc *= x;
    v = c * acc;
  }
  Spectrum fine_half(fft::half_size(grid.dim(), fine_n));
  fft::r2c(grid.dim(), fine_n, fine, fine_half);
  return fft::truncate_half(grid, fine_half, fine_n);
}

int pad_for(int p, int requested) { return requested == 0 ? power_pad_factor(p) : requested; }

std::vector<Spectrum> source_spectra(const Trajectory& u, const ProblemParams& pp, const SolverConfig& cfg) {
  std::vector<Spectrum> src;
  src.reserve(u.size());
  const int pad = pad_for(pp.p, cfg.dealias_factor);
  for (const auto& f : u.fields()) {
    if (cfg.nonlinearity == 0.0) {
      src.emplace_back(f.grid().half_size(), Complex{});
    } else {
      src.push_back(power_spectrum(f.grid(), f.half_spectrum(), pp.p, pad, cfg.nonlinearity));
    }
  }
  return src;
}

std::vector<Spectrum> linear_spectra(const GridField& u0, const GridField& u1, std::span<const double> t) {
  const TorusGrid& grid = u0.grid();
  auto s0 = u0.half_spectrum();
  auto s1 = u1.half_spectrum();
  std::vector<Spectrum> out;
  out.reserve(t.size());
  for (double ti : t) {
    if (ti == 0.0) {
      out.emplace_back(s0.begin(), s0.end());
      continue;
    }
    auto d = d_symbol(grid, ti);
    auto dd = sample_radial(grid, [ti](double r) { return damped_symbol_dt(ti, r); });
    Spectrum s(s0.size());
    for (std::size_t m = 0; m < s.size(); ++m) s[m] = (d[m] + dd[m]) * s0[m] + d[m] * s1[m];
    out.push_back(std::move(s));
  }
  return out;
}

Trajectory assemble(const TorusGrid& grid, std::span<const double> t, const std::vector<Spectrum>& lin,
                    const std::vector<Spectrum>& duhamel, const GridField& u0) {
  std::vector<GridField> fields;
  fields.reserve(t.size());
  fields.push_back(u0);  // u(0) = u0 exactly
  for (std::size_t i = 1; i < t.size(); ++i) {
    Spectrum s(lin[i]);
    for (std::size_t m = 0; m < s.size(); ++m) s[m] += duhamel[i][m];
    fields.push_back(GridField::from_half_spectrum(grid, s));
  }
  return Trajectory(std::vector<double>(t.begin(), t.end()), std::move(fields));
}

std::vector<std::size_t> all_nodes(std::size_t m) {
  std::vector<std::size_t> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = i;
  return v;
}

void require_data(const GridField& u0, const GridField& u1) {
  if (!(u0.grid() == u1.grid())) throw std::invalid_argument("solver: u0 and u1 live on different grids");
}

// First node above the cap, if any.
bool detect_blowup(const Trajectory& u, double cap, PicardDiagnostics& diag) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].max_abs() > cap) {
      diag.blew_up = true;
      diag.escape_time = u.times()[i];
      diag.under_resolved = top_octave_fraction(u[i]) > 0.1;
      return true;
    }
  }
  return false;
}

double l2_of(std::span<const Complex> half, const TorusGrid& grid) {
  return lebesgue_norm(GridField::from_half_spectrum(grid, half), 2.0);
}

// Richardson estimate (I_h - I_2h) / 3 of the trapezoid error, relative to the
// solution's L^2 norm, over even-indexed nodes.
double trapezoid_error(const Trajectory& u, const std::vector<Spectrum>& src) {
  const auto t = u.times();
  if (t.size() < 3) return 0.0;
  std::vector<double> coarse_t;
  std::vector<Spectrum> coarse_src;
  for (std::size_t i = 0; i < t.size(); i += 2) {
    coarse_t.push_back(t[i]);
    coarse_src.push_back(src[i]);
  }
  std::vector<std::size_t> fine_out, coarse_out;
  for (std::size_t i = 2; i < t.size(); i += 2) {
    fine_out.push_back(i);
    coarse_out.push_back(i / 2);
  }
  auto fine = duhamel_trapezoid(u.grid(), t, src, fine_out);
  auto coarse = duhamel_trapezoid(u.grid(), coarse_t, coarse_src, coarse_out);
  double scale = 0.0;
  for (const auto& f : u.fields()) scale = std::max(scale, lebesgue_norm(f, 2.0));
  if (scale == 0.0) return 0.0;
  double err = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    Spectrum diff(fine[k].size());
    for (std::size_t m = 0; m < diff.size(); ++m) diff[m] = (fine[k][m] - coarse[k][m]) / 3.0;
    err = std::max(err, l2_of(diff, u.grid()));
  }
  return err / scale;
}

}  // namespace

// ---------------------------------------------------------------------------

void SolverConfig::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("SolverConfig: horizon T must be positive");
  if (time_grid.size() < 2) throw std::invalid_argument("SolverConfig: time grid needs at least two nodes");
  if (time_grid.front() != 0.0) throw std::invalid_argument("SolverConfig: time grid must start at 0");
  if (std::abs(time_grid.back() - T) > 1e-12 * T) throw std::invalid_argument("SolverConfig: time grid must end at T");
  for (std::size_t i = 1; i < time_grid.size(); ++i)
    if (!(time_grid[i] > time_grid[i - 1])) throw std::invalid_argument("SolverConfig: time grid must increase");
  if (!(picard_tol > 0.0)) throw std::invalid_argument("SolverConfig: picard_tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (quadrature == Quadrature::GaussPanels) {
    (void)gauss_rule(gauss_order);
    if (gauss_panels < 1) throw std::invalid_argument("SolverConfig: gauss_panels must be >= 1");
  }
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("SolverConfig: blowup threshold must be positive");
  if (dealias_factor < 0) throw std::invalid_argument("SolverConfig: dealias factor must be >= 0");
  if (!std::isfinite(nonlinearity)) throw std::invalid_argument("SolverConfig: nonlinearity must be finite");
  if (!(etd_dt > 0.0)) throw std::invalid_argument("SolverConfig: etd_dt must be positive");
}

std::vector<double> uniform_time_grid(double T, int steps) {
  if (!(T > 0.0) || steps < 1) throw std::invalid_argument("uniform_time_grid: need T > 0 and steps >= 1");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[k] = T * k / steps;
  t.back() = T;
  return t;
}

std::vector<double> geometric_time_grid(double T, double t_first, int count) {
  if (!(T > t_first) || !(t_first > 0.0) || count < 2)
    throw std::invalid_argument("geometric_time_grid: need 0 < t_first < T and count >= 2");
  std::vector<double> t{0.0};
  const double rho = std::pow(T / t_first, 1.0 / (count - 1));
  for (int k = 0; k < count; ++k) t.push_back(t_first * std::pow(rho, k));
  t.back() = T;
  return t;
}

GridField duhamel_integral(const Trajectory& source, double t, const SolverConfig& cfg) {
  const auto nodes = source.times();
  if (!(t >= 0.0) || t > nodes.back() * (1.0 + 1e-14))
    throw std::invalid_argument("duhamel_integral: t outside the source's time span");
  const TorusGrid& grid = source.grid();
  if (t == 0.0) return GridField::zeros(grid);

  std::vector<Spectrum> all;
  all.reserve(source.size());
  for (const auto& f : source.fields()) all.emplace_back(f.half_spectrum().begin(), f.half_spectrum().end());

  std::size_t last = 0;
  while (last + 1 < nodes.size() && nodes[last + 1] <= t) ++last;
  if (nodes[last] == t) {
    auto out = duhamel_at(grid, nodes, all, {last}, cfg);
    return GridField::from_half_spectrum(grid, out[0]);
  }

  if (cfg.quadrature == Quadrature::Trapezoid) {
    // t falls inside (t_last, t_last+1): append it with the source interpolated linearly.
    std::vector<double> t_aug(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    std::vector<Spectrum> s_aug(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    Spectrum at_t(grid.half_size());
    const double w = (t - nodes[last]) / (nodes[last + 1] - nodes[last]);
    for (std::size_t m = 0; m < at_t.size(); ++m) at_t[m] = (1.0 - w) * all[last][m] + w * all[last + 1][m];
    t_aug.push_back(t);
    s_aug.push_back(std::move(at_t));
    auto out = duhamel_trapezoid(grid, t_aug, s_aug, {t_aug.size() - 1});
    return GridField::from_half_spectrum(grid, out[0]);
  }
  return GridField::from_half_spectrum(grid, panel_integral(grid, nodes, all, t, cfg.gauss_order, cfg.gauss_panels));
}

Trajectory picard_map(const Trajectory& u, const GridField& u0, const GridField& u1, const ProblemParams& pp,
                      const SolverConfig& cfg) {
  require_data(u0, u1);
  if (!(u.grid() == u0.grid())) throw std::invalid_argument("picard_map: trajectory grid differs from data grid");
  const auto t = u.times();
  auto lin = linear_spectra(u0, u1, t);
  auto src = source_spectra(u, pp, cfg);
  auto duh = duhamel_at(u.grid(), t, src, all_nodes(t.size()), cfg);
  return assemble(u.grid(), t, lin, duh, u0);
}

PicardResult picard_solve(const GridField& u0, const GridField& u1, const ProblemParams& pp,
                          const SolverConfig& cfg) {
  cfg.validate();
  require_data(u0, u1);
  if (!(cfg.blowup_threshold > u0.max_abs()))
    throw std::invalid_argument("picard_solve: blowup threshold must exceed the initial data's sup norm");
  const TorusGrid& grid = u0.grid();
  const auto& t = cfg.time_grid;
  const auto lin = linear_spectra(u0, u1, t);
  std::vector<Spectrum> no_duhamel(t.size(), Spectrum(grid.half_size(), Complex{}));
  Trajectory u = assemble(grid, t, lin, no_duhamel, u0);

  PicardDiagnostics diag;
  diag.x_norms.push_back(x_norm(u, pp));
  auto step = [&](const Trajectory& v) {
    auto src = source_spectra(v, pp, cfg);
    auto duh = duhamel_at(grid, t, src, all_nodes(t.size()), cfg);
    return assemble(grid, t, lin, duh, u0);
  };

  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (detect_blowup(u, cfg.blowup_threshold, diag)) break;
    Trajectory next = step(u);
    const Trajectory delta = next - u;
    const double diff = x_norm(delta, pp);
    // X(T) is blind to the mean, which u^p feeds for even p.
    double sup_diff = 0.0;
    for (const auto& f : delta.fields()) sup_diff = std::max(sup_diff, f.max_abs());
    if (!diag.differences.empty()) {
      const double prev = diag.differences.back();
      diag.ratios.push_back(prev > 0.0 ? diff / prev : 0.0);
    }
    diag.differences.push_back(diff);
    diag.iterations = it;
    u = std::move(next);
    diag.x_norms.push_back(x_norm(u, pp));
    if (diff < cfg.picard_tol && sup_diff < cfg.picard_tol) {
      diag.converged = true;
      break;
    }
  }
  if (!diag.blew_up) detect_blowup(u, cfg.blowup_threshold, diag);
  diag.non_contracting = std::any_of(diag.ratios.begin(), diag.ratios.end(), [](double r) { return r >= 1.0; });

  if (diag.blew_up) {
    diag.converged = false;
    diag.residual = diag.differences.empty() ? kNaN : diag.differences.back();
  } else {
    diag.residual = x_norm(step(u) - u, pp);
    if (cfg.quadrature == Quadrature::Trapezoid && cfg.nonlinearity != 0.0)
      diag.quadrature_error = trapezoid_error(u, source_spectra(u, pp, cfg));
  }
  return {std::move(u), std::move(diag)};
}

// ---------------------------------------------------------------------------

EtdRun etd_oracle(const GridField& u0, const GridField& u1, const ProblemParams& pp, const EtdConfig& cfg) {
  require_data(u0, u1);
  if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw std::invalid_argument("etd_oracle: dt and T must be positive");
  if (!(cfg.blowup_threshold > 0.0)) throw std::invalid_argument("etd_oracle: blowup threshold must be positive");
  const double steps_real = cfg.T / cfg.dt;
  const auto steps = static_cast<long>(std::llround(steps_real));
  if (std::abs(steps_real - steps) > 1e-9 * std::max(1.0, steps_real))
    throw std::invalid_argument("etd_oracle: T must be a multiple of dt");

  std::vector<long> record;
  if (cfg.output_times.empty()) {
    for (long n = 0; n <= steps; ++n) record.push_back(n);
  } else {
    record.push_back(0);
    for (double tau : cfg.output_times) {
      const double m_real = tau / cfg.dt;
      const long m = std::llround(m_real);
      if (tau < 0.0 || m > steps || std::abs(m_real - m) > 1e-9 * std::max(1.0, m_real))
        throw std::invalid_argument("etd_oracle: output times must be multiples of dt within [0, T]");
      record.push_back(m);
    }
    std::sort(record.begin(), record.end());
    record.erase(std::unique(record.begin(), record.end()), record.end());
  }

  const TorusGrid& grid = u0.grid();
  const double h = cfg.dt;
  auto abs_freq = grid.half_abs_frequency();
  const std::size_t hs = grid.half_size();
  std::vector<double> e11(hs), e12(hs), e21(hs), e22(hs), f0u(hs), f1u(hs), f0v(hs), f1v(hs);
  const GaussRule& rule = gauss_rule(20);
  for (std::size_t m = 0; m < hs; ++m) {
    const double r = abs_freq[m];
    const double d = damped_symbol(h, r);
    const double dd = damped_symbol_dt(h, r);
    e11[m] = d + dd;
    e12[m] = d;
    e21[m] = -r * r * d;
    e22[m] = dd;
    double i0 = 0.0, i1 = 0.0;
    for (std::size_t g = 0; g < rule.x.size(); ++g) {
      const double s = 0.5 * h * (rule.x[g] + 1.0);
      const double v = 0.5 * h * rule.w[g] * damped_symbol(s, r);
      i0 += v;
      i1 += v * (1.0 - s / h);
    }
    f0u[m] = i0;  // int_0^h d(s) ds
    f1u[m] = i1;  // int_0^h d(s) (1 - s/h) ds
    f0v[m] = d;   // int_0^h d'(s) ds
    f1v[m] = i0 / h;
  }

  const int pad = pad_for(pp.p, cfg.dealias_factor);
  auto nonlinear = [&](const Spectrum& u) {
    if (cfg.nonlinearity == 0.0) return Spectrum(hs, Complex{});
    return power_spectrum(grid, u, pp.p, pad, cfg.nonlinearity);
  };

  Spectrum U(u0.half_spectrum().begin(), u0.half_spectrum().end());
  Spectrum V(u1.half_spectrum().begin(), u1.half_spectrum().end());
  std::vector<double> times{0.0};
  std::vector<GridField> fields{u0};
  EtdRun run{Trajectory({0.0}, {u0}), false, 0.0, false};

  std::size_t next_record = 1;
  Spectrum aU(hs), aV(hs);
  for (long n = 0; n < steps; ++n) {
    const Spectrum Fn = nonlinear(U);
    for (std::size_t m = 0; m < hs; ++m) {
      aU[m] = e11[m] * U[m] + e12[m] * V[m] + f0u[m] * Fn[m];
      aV[m] = e21[m] * U[m] + e22[m] * V[m] + f0v[m] * Fn[m];
    }
    const Spectrum Fa = nonlinear(aU);
    bool finite = true;
    for (std::size_t m = 0; m < hs; ++m) {
      const Complex delta = Fa[m] - Fn[m];
      U[m] = aU[m] + f1u[m] * delta;
      V[m] = aV[m] + f1v[m] * delta;
      finite = finite && std::isfinite(U[m].real()) && std::isfinite(U[m].imag());
    }
    const double t_next = (n + 1) * h;
    std::vector<double> vals(grid.size());
    if (finite) {
      fft::c2r(grid.dim(), grid.points_per_axis(), U, vals);
      const double inv = 1.0 / static_cast<double>(vals.size());
      for (double& v : vals) {
        v *= inv;
        finite = finite && std::isfinite(v);
      }
    }
    if (!finite) {
      run.blew_up = true;
      run.escape_time = t_next;
      run.under_resolved = true;
      break;
    }
    GridField u(grid, std::move(vals));
    if (u.max_abs() > cfg.blowup_threshold) {
      run.blew_up = true;
      run.escape_time = t_next;
      run.under_resolved = top_octave_fraction(u) > 0.1;
      break;
    }
    if (next_record < record.size() && record[next_record] == n + 1) {
      times.push_back(t_next);
      fields.push_back(std::move(u));
      ++next_record;
    }
  }
  run.trajectory = Trajectory(std::move(times), std::move(fields));
  return run;
}

// ---------------------------------------------------------------------------

namespace {

double first_ratio(const PicardDiagnostics& d) {
  if (d.differences.empty()) return kNaN;
  if (d.differences[0] == 0.0) return 0.0;
  if (d.differences.size() < 2) return kNaN;
  return d.differences[1] / d.differences[0];
}

// Log-log slope of ratio against `key` among runs sharing the most common
// value of `group`.
double grouped_slope(const std::vector<ContractionSample>& runs, bool by_amplitude) {
  std::map<double, std::vector<std::pair<double, double>>> groups;
  for (const auto& r : runs) {
    const double ratio = first_ratio(r.diagnostics);
    if (!(ratio > 0.0)) continue;
    const double group = by_amplitude ? r.horizon : r.amplitude;
    const double key = by_amplitude ? r.amplitude : r.horizon;
    groups[group].push_back({std::log(key), std::log(ratio)});
  }
  const std::vector<std::pair<double, double>>* best = nullptr;
  for (const auto& [g, pts] : groups) {
    std::vector<double> keys;
    for (const auto& pt : pts) keys.push_back(pt.first);
    std::sort(keys.begin(), keys.end());
    const auto distinct = std::unique(keys.begin(), keys.end()) - keys.begin();
    if (distinct >= 2 && (best == nullptr || pts.size() > best->size())) best = &pts;
  }
  if (best == nullptr) return kNaN;
  std::vector<double> x, y;
  for (const auto& [a, b] : *best) {
    x.push_back(a);
    y.push_back(b);
  }
  return fit_line(x, y).slope;
}

}  // namespace

ExperimentReport contraction_report(const std::vector<ContractionSample>& runs, const ProblemParams& pp) {
  ExperimentReport rep;
  rep.kind = "contraction";
  Table table{{"amplitude", "horizon", "first_ratio", "max_ratio", "iterations", "residual"}, {}};
  double max_ratio = 0.0;
  for (const auto& r : runs) {
    const auto& d = r.diagnostics;
    double run_max = d.ratios.empty() ? 0.0 : *std::max_element(d.ratios.begin(), d.ratios.end());
    const double fr = first_ratio(d);
    if (std::isfinite(fr)) run_max = std::max(run_max, fr);
    max_ratio = std::max(max_ratio, run_max);
    table.add_row({r.amplitude, r.horizon, fr, run_max, static_cast<double>(d.iterations), d.residual});
  }
  rep.tables["contraction"] = std::move(table);
  const double expected = pp.p - 1.0;
  const double amp_slope = grouped_slope(runs, true);
  rep.scalars["expected_amplitude_slope"] = expected;
  rep.scalars["fitted_amplitude_slope"] = amp_slope;
  rep.scalars["fitted_horizon_slope"] = grouped_slope(runs, false);
  rep.scalars["max_ratio"] = max_ratio;
  if (std::isfinite(amp_slope))
    rep.verdict("amplitude-slope", std::abs(amp_slope - expected) <= 0.2,
                "fitted " + num(amp_slope) + ", expected " + num(expected) + " +- 0.2");
  rep.verdict("contracting", max_ratio < 1.0, "max ratio " + num(max_ratio));
  return rep;
}

ExperimentReport contraction_report(const PicardDiagnostics& diag, const ProblemParams& pp,
                                    const SolverConfig& cfg) {
  ExperimentReport rep;
  rep.kind = "contraction";
  Table table{{"iteration", "x_norm", "difference", "ratio"}, {}};
  for (std::size_t k = 0; k < diag.differences.size(); ++k) {
    const double ratio = k == 0 ? kNaN : diag.ratios[k - 1];
    table.add_row({static_cast<double>(k + 1), diag.x_norms[k + 1], diag.differences[k], ratio});
  }
  rep.tables["iterations"] = std::move(table);
  const double max_ratio = diag.ratios.empty() ? 0.0 : *std::max_element(diag.ratios.begin(), diag.ratios.end());
  rep.scalars["max_ratio"] = max_ratio;
  rep.scalars["first_ratio"] = first_ratio(diag);
  rep.scalars["residual"] = diag.residual;
  rep.scalars["iterations"] = diag.iterations;
  rep.scalars["horizon"] = cfg.T;
  rep.scalars["expected_amplitude_slope"] = pp.p - 1.0;
  rep.verdict("converged", diag.converged, "residual " + num(diag.residual));
  rep.verdict("contracting", !diag.non_contracting, "max ratio " + num(max_ratio));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport decay_study(const Trajectory& traj, const ProblemParams& pp, const DecayOptions& opts) {
  if (opts.blew_up) throw BlowupError("decay_study: the run blew up");
  const auto& blocks = *DyadicBlocks::for_grid(traj.grid());
  const double w = pp.x_weight_exponent();
  std::vector<double> br, bs, weighted, xp, shell;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    br.push_back(besov_seminorm(traj[i], {0.0, pp.r, 2.0, true}, blocks));
    bs.push_back(besov_seminorm(traj[i], {pp.s, 2.0, 2.0, true}, blocks));
    weighted.push_back(std::pow(japanese(traj.times()[i]), w) * bs.back());
    xp.push_back(weighted.back() + br.back());
    shell.push_back(outer_shell_fraction(traj[i]));
  }
  const double max_shell = *std::max_element(shell.begin(), shell.end());
  if (max_shell > opts.shell_limit)
    throw ConfinementError("decay_study: outer-shell energy fraction " + num(max_shell) +
                           " exceeds " + num(opts.shell_limit));

  const auto t = traj.times();
  const auto [lo, hi] = last_decade(t);
  auto exponent = [&](const std::vector<double>& v) {
    try {
      return fit_decay_exponent(t, v, lo, hi).slope;
    } catch (const std::invalid_argument&) {
      return kNaN;
    }
  };

  ExperimentReport rep;
  rep.kind = "decay";
  Table table{{"t", "besov_r", "besov_s", "weighted_s", "x_profile", "shell_fraction"}, {}};
  for (std::size_t i = 0; i < traj.size(); ++i) table.add_row({t[i], br[i], bs[i], weighted[i], xp[i], shell[i]});
  rep.tables["decay"] = std::move(table);
  rep.scalars["fitted_besov_r_exponent"] = exponent(br);
  rep.scalars["fitted_besov_s_exponent"] = exponent(bs);
  rep.scalars["expected_linear_besov_s_exponent"] = -w;
  const double trend = exponent(xp);
  rep.scalars["x_trend_slope"] = trend;
  rep.scalars["x_sup"] = *std::max_element(xp.begin(), xp.end());
  rep.scalars["max_shell_fraction"] = max_shell;
  rep.scalars["fit_window_lo"] = lo;
  rep.scalars["fit_window_hi"] = hi;
  rep.verdict("box-confinement", true, "max shell fraction " + num(max_shell));
  rep.verdict("x-profile-bounded", !(trend > opts.trend_limit),
              "last-decade slope " + num(trend) + " <= " + num(opts.trend_limit));
  return rep;
}

ExperimentReport blowup_probe(const GridField& u0, const GridField& u1, const ProblemParams& pp,
                              const SolverConfig& cfg) {
  require_data(u0, u1);
  EtdConfig ec;
  ec.dt = cfg.etd_dt;
  ec.T = cfg.T;
  ec.output_times = {cfg.T};
  ec.blowup_threshold = cfg.blowup_threshold;
  ec.nonlinearity = cfg.nonlinearity;
  ec.dealias_factor = cfg.dealias_factor;
  const EtdRun coarse = etd_oracle(u0, u1, pp, ec);
  const EtdRun fine = etd_oracle(refine(u0, 2), refine(u1, 2), pp, ec);

  ExperimentReport rep;
  rep.kind = "blowup-probe";
  rep.scalars["amplitude"] = u0.max_abs();
  rep.scalars["p"] = pp.p;
  rep.scalars["fujita"] = pp.fujita;
  rep.scalars["escaped"] = coarse.blew_up ? 1.0 : 0.0;
  rep.scalars["escaped_refined"] = fine.blew_up ? 1.0 : 0.0;
  rep.scalars["escape_time"] = coarse.blew_up ? coarse.escape_time : kNaN;
  rep.scalars["escape_time_refined"] = fine.blew_up ? fine.escape_time : kNaN;
  rep.scalars["under_resolved"] = (coarse.under_resolved || fine.under_resolved) ? 1.0 : 0.0;
  if (coarse.blew_up && fine.blew_up) {
    const double change = std::abs(fine.escape_time - coarse.escape_time) / coarse.escape_time;
    rep.scalars["escape_relative_change"] = change;
    rep.labels["outcome"] = "escape";
    rep.verdict("escape-stable", change <= 0.1, "relative change " + num(change) + " <= 0.1");
  } else if (!coarse.blew_up && !fine.blew_up) {
    rep.scalars["escape_relative_change"] = 0.0;
    rep.labels["outcome"] = "no-escape";
    rep.verdict("escape-stable", true, "no escape by T at either resolution");
  } else {
    rep.scalars["escape_relative_change"] = kNaN;
    rep.labels["outcome"] = "inconsistent";
    rep.verdict("escape-stable", false, "escape at one resolution only");
  }
  return rep;
}

}  // namespace bwl
