#include "bwl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bwl/fit.hpp"

namespace bwl {

namespace {

void require_exponent(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1 (got " + std::to_string(p) + ")");
}

double lp_of_samples(std::span<const double> v, const TorusGrid& grid, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  // Scale by the max first so large p does not overflow.
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  if (p == 2.0) {
    for (double x : v) acc += (x / m) * (x / m);
  } else {
    for (double x : v) acc += std::pow(std::abs(x) / m, p);
  }
  return m * std::pow(acc * grid.cell_volume(), 1.0 / p);
}

double l2_from_half(const TorusGrid& grid, std::span<const Complex> half) {
  auto mult = grid.half_multiplicity();
  double acc = 0.0;
  for (std::size_t i = 0; i < half.size(); ++i) acc += mult[i] * std::norm(half[i]);
  return std::sqrt(acc * grid.cell_volume() / static_cast<double>(grid.size()));
}

}  // namespace

// ---------------------------------------------------------------------------

ProblemParams ProblemParams::make(int n, double r, double s, int p, std::optional<double> eps) {
  if (n < 1) throw std::invalid_argument("ProblemParams: dimension must be >= 1");
  if (!(r > 2.0) || !std::isfinite(r))
    throw std::invalid_argument("ProblemParams: r must lie in (2, inf) (got " + std::to_string(r) + ")");
  if (p < 2) throw std::invalid_argument("ProblemParams: nonlinearity power must be an integer >= 2");
  ProblemParams pp;
  pp.n = n;
  pp.r = r;
  pp.s = s;
  pp.p = p;
  pp.beta = (n - 1) * (0.5 - 1.0 / r);
  pp.eta = 0.5 * (s - 1.0) + 0.5 * n * (p / r - 0.5);
  pp.fujita = 1.0 + 2.0 * r / n;
  if (2.0 * s >= n) {
    pp.sigma2 = r;
  } else {
    pp.sigma2 = std::min(r, 2.0 * n / (p * (n - 2.0 * s)));
  }
  const double base = std::max(1.0, r / p);
  if (!(pp.sigma2 > base))
    throw std::invalid_argument("ProblemParams: empty sigma window, sigma2 <= max{1, r/p}");
  pp.eps = eps.value_or(0.05 * (pp.sigma2 - base));
  if (!(pp.eps > 0.0)) throw std::invalid_argument("ProblemParams: eps must be positive");
  pp.sigma1 = base + pp.eps;
  if (!(pp.sigma1 < pp.sigma2)) throw std::invalid_argument("ProblemParams: sigma1 >= sigma2");
  return pp;
}

double ProblemParams::x_weight_exponent() const { return 0.5 * s - 0.5 * n * (0.5 - 1.0 / r); }

// ---------------------------------------------------------------------------

Trajectory::Trajectory(std::vector<double> times, std::vector<GridField> fields)
    : times_(std::move(times)), fields_(std::move(fields)) {
  if (times_.empty()) throw std::invalid_argument("Trajectory: empty");
  if (times_.size() != fields_.size()) throw std::invalid_argument("Trajectory: times/fields mismatch");
  if (times_.front() != 0.0) throw std::invalid_argument("Trajectory: first time must be 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("Trajectory: times must increase");
    if (!(fields_[i].grid() == fields_[0].grid()))
      throw std::invalid_argument("Trajectory: fields on different grids");
  }
}

Trajectory Trajectory::scaled(double factor) const {
  std::vector<GridField> f;
  f.reserve(fields_.size());
  for (const auto& g : fields_) f.push_back(g * factor);
  return Trajectory(times_, std::move(f));
}

Trajectory Trajectory::operator-(const Trajectory& other) const {
  if (times_ != other.times_) throw std::invalid_argument("Trajectory: time grids differ");
  std::vector<GridField> f;
  f.reserve(fields_.size());
  for (std::size_t i = 0; i < fields_.size(); ++i) f.push_back(fields_[i] - other.fields_[i]);
  return Trajectory(times_, std::move(f));
}

// ---------------------------------------------------------------------------

double lebesgue_norm(const GridField& f, double p) {
  require_exponent(p);
  return lp_of_samples(f.values(), f.grid(), p);
}

std::vector<double> block_norms(const DyadicBlocks& blocks, std::span<const Complex> half, double p) {
  require_exponent(p);
  const TorusGrid& grid = blocks.grid();
  if (half.size() != grid.half_size()) throw std::invalid_argument("block_norms: spectrum size mismatch");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(blocks.j_max() - blocks.j_min() + 1));
  std::vector<Complex> work(half.size());
  for (int j = blocks.j_min(); j <= blocks.j_max(); ++j) {
    auto sym = blocks.block_symbol(j);
    bool any = false;
    for (std::size_t i = 0; i < half.size(); ++i) {
      work[i] = half[i] * sym[i];
      any = any || work[i] != Complex{};
    }
    if (!any) {
      out.push_back(0.0);
      continue;
    }
    if (p == 2.0) {
      out.push_back(l2_from_half(grid, work));
      continue;
    }
    auto field = GridField::from_half_spectrum(grid, work);
    out.push_back(lp_of_samples(field.values(), grid, p));
  }
  return out;
}

std::vector<double> block_norms(const DyadicBlocks& blocks, const GridField& f, double p) {
  if (!(blocks.grid() == f.grid())) throw std::invalid_argument("block_norms: grid mismatch");
  return block_norms(blocks, f.half_spectrum(), p);
}

double besov_from_blocks(std::span<const double> norms, int j_min, double s, double q) {
  require_exponent(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double term = std::exp2(s * (j_min + static_cast<int>(i))) * norms[i];
    if (std::isinf(q))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, q);
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

double besov_seminorm(const GridField& f, const BesovParams& bp, const DyadicBlocks& blocks) {
  require_exponent(bp.p);
  require_exponent(bp.q);
  auto norms = block_norms(blocks, f, bp.p);
  if (bp.homogeneous) return besov_from_blocks(norms, blocks.j_min(), bp.s, bp.q);

  // ||Delta_{<=0} f||_p + l^q over j >= 1.
  const double low = lebesgue_norm(project(blocks, f, LowPass{1.0}), bp.p);
  const int first = std::max(1, blocks.j_min());
  if (first > blocks.j_max()) return low;
  std::span<const double> tail(norms.data() + (first - blocks.j_min()),
                               static_cast<std::size_t>(blocks.j_max() - first + 1));
  return low + besov_from_blocks(tail, first, bp.s, bp.q);
}

double besov_seminorm(const GridField& f, const BesovParams& bp) {
  return besov_seminorm(f, bp, *DyadicBlocks::for_grid(f.grid()));
}

double sobolev_norm(const GridField& f, double s, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("sobolev_norm: p must lie in (1, inf)");
  if (s == 0.0) return lebesgue_norm(f, p);
  auto bessel = apply_radial_multiplier([s](double r) { return std::pow(1.0 + r * r, 0.5 * s); }, f);
  return lebesgue_norm(bessel, p);
}

// ---------------------------------------------------------------------------

std::vector<double> x_profile(const Trajectory& traj, const ProblemParams& pp) {
  const auto& blocks = *DyadicBlocks::for_grid(traj.grid());
  const double w = pp.x_weight_exponent();
  std::vector<double> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double high = besov_seminorm(traj[i], {pp.s, 2.0, 2.0, true}, blocks);
    const double low = besov_seminorm(traj[i], {0.0, pp.r, 2.0, true}, blocks);
    out.push_back(std::pow(japanese(traj.times()[i]), w) * high + low);
  }
  return out;
}

double x_norm(const Trajectory& traj, const ProblemParams& pp) {
  auto prof = x_profile(traj, pp);
  return *std::max_element(prof.begin(), prof.end());
}

std::vector<double> gamma_grid(const ProblemParams& pp, int interior) {
  if (interior < 0) throw std::invalid_argument("gamma_grid: negative point count");
  const int count = interior + 2;
  std::vector<double> g(static_cast<std::size_t>(count));
  const double ratio = std::pow(pp.sigma2 / pp.sigma1, 1.0 / (count - 1));
  for (int k = 0; k < count; ++k) g[k] = pp.sigma1 * std::pow(ratio, k);
  g.front() = pp.sigma1;
  g.back() = pp.sigma2;
  return g;
}

std::vector<double> y_profile(const Trajectory& traj, const ProblemParams& pp, int interior) {
  if (!(pp.s > 0.0)) throw std::invalid_argument("y_norm: requires s > 0");
  const auto& blocks = *DyadicBlocks::for_grid(traj.grid());
  const auto gammas = gamma_grid(pp, interior);
  std::vector<double> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double tw = japanese(traj.times()[i]);
    const GridField& psi = traj[i];
    double smooth;
    if (pp.s <= 1.0)
      smooth = besov_seminorm(project(blocks, psi, HighPass{1.0}), {pp.s - 1.0, 2.0, 2.0, true}, blocks);
    else
      smooth = besov_seminorm(psi, {pp.s - 1.0, 2.0, 2.0, true}, blocks);
    double best = 0.0;
    for (double g : gammas) {
      const double weight = std::pow(tw, 0.5 * pp.n * (pp.p / pp.r - 1.0 / g));
      best = std::max(best, weight * besov_seminorm(psi, {0.0, g, 2.0, true}, blocks));
    }
    out.push_back(std::pow(tw, pp.eta) * smooth + best);
  }
  return out;
}

double y_norm(const Trajectory& traj, const ProblemParams& pp, int interior) {
  auto prof = y_profile(traj, pp, interior);
  return *std::max_element(prof.begin(), prof.end());
}

double interpolation_check(const GridField& f, const ProblemParams& pp, double q, double alpha,
                           double theta) {
  require_exponent(q);
  if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("interpolation_check: theta outside [0, 1]");
  const double n = pp.n;
  const double lhs = (std::isinf(q) ? 0.0 : n / q) - alpha;
  const double rhs = (1.0 - theta) * n / pp.r + theta * (0.5 * n - pp.s);
  if (std::abs(lhs - rhs) > 1e-10)
    throw std::invalid_argument("interpolation_check: (q, alpha, theta) off the scaling line");
  if (alpha > theta * pp.s + 1e-12) throw std::invalid_argument("interpolation_check: alpha > theta s");
  const auto& blocks = *DyadicBlocks::for_grid(f.grid());
  const double num = besov_seminorm(f, {alpha, q, 2.0, true}, blocks);
  const double lo = besov_seminorm(f, {0.0, pp.r, 2.0, true}, blocks);
  const double hi = besov_seminorm(f, {pp.s, 2.0, 2.0, true}, blocks);
  const double den = std::pow(lo, 1.0 - theta) * std::pow(hi, theta);
  if (!(den > 0.0)) throw std::domain_error("interpolation_check: zero denominator");
  return num / den;
}

}  // namespace bwl
