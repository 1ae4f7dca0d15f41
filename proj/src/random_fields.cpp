#include "bwl/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "bwl/littlewood_paley.hpp"
#include "bwl/norms.hpp"

namespace bwl {

namespace {

constexpr double kPi = std::numbers::pi;

// Flat r2c index of wavenumber k, which must have k[dim-1] >= 0.
std::size_t half_index(const TorusGrid& grid, const std::array<int, 3>& k) {
  const int n = grid.points_per_axis();
  const int dim = grid.dim();
  std::size_t flat = 0;
  for (int d = 0; d < dim - 1; ++d) flat = flat * n + static_cast<std::size_t>(k[d] >= 0 ? k[d] : n + k[d]);
  return flat * static_cast<std::size_t>(n / 2 + 1) + static_cast<std::size_t>(k[dim - 1]);
}

bool lex_positive(const std::array<int, 3>& k, int dim) {
  for (int d = 0; d < dim; ++d)
    if (k[d] != 0) return k[d] > 0;
  return false;
}

// Raw r2c value for the Fourier-series coefficient c of exp(i xi_k . x).
Complex raw_coefficient(const TorusGrid& grid, const std::array<int, 3>& k, Complex c) {
  int parity = 0;
  for (int d = 0; d < grid.dim(); ++d) parity += k[d];
  const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
  return c * (static_cast<double>(grid.size()) * sign);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

GridField random_power_law(const TorusGrid& grid, double slope, double xi_lo, double xi_hi,
                           std::uint64_t seed) {
  if (!(xi_hi > xi_lo) || xi_lo < 0.0) throw std::invalid_argument("random_power_law: bad band");
  const double unit = grid.frequency_unit();
  const int dim = grid.dim();
  const int kmax = static_cast<int>(std::floor(xi_hi / unit));
  if (kmax >= grid.points_per_axis() / 2)
    throw std::invalid_argument("random_power_law: band reaches the grid's Nyquist frequency");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> half(grid.half_size(), Complex{});
  bool any = false;

  std::array<int, 3> k{0, 0, 0};
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    lo[d] = -kmax;
    hi[d] = kmax;
  }
  for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
    for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
      for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
        if (!lex_positive(k, dim)) continue;
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += (unit * k[d]) * (unit * k[d]);
        const double r = std::sqrt(r2);
        if (r < xi_lo || r > xi_hi) continue;
        const double re = normal(rng);
        const double im = normal(rng);
        const Complex c = Complex(re, im) * std::pow(r, -slope);
        const std::array<int, 3> m{-k[0], -k[1], -k[2]};
        if (k[dim - 1] >= 0) half[half_index(grid, k)] = raw_coefficient(grid, k, c);
        if (m[dim - 1] >= 0) half[half_index(grid, m)] = raw_coefficient(grid, m, std::conj(c));
        any = true;
      }
  if (!any) throw std::invalid_argument("random_power_law: no lattice frequency in the band");
  GridField f = GridField::from_half_spectrum(grid, half);
  return f * (1.0 / lebesgue_norm(f, 2.0));
}

GridField gaussian_profile(const TorusGrid& grid, double width, double amplitude) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_profile: width must be positive");
  const int dim = grid.dim();
  return GridField::from_function(grid, [=](const Frequency& x) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
    return amplitude * std::exp(-0.5 * r2 / (width * width));
  });
}

GridField slow_decay_profile(const TorusGrid& grid, double decay, double radius, double amplitude) {
  if (!(radius > 0.0)) throw std::invalid_argument("slow_decay_profile: radius must be positive");
  const int dim = grid.dim();
  const double fall = radius / 8.0;
  return GridField::from_function(grid, [=](const Frequency& x) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
    const double rho = std::sqrt(r2);
    const double window = 0.5 * std::erfc((rho - radius) / fall);
    return amplitude * std::pow(1.0 + r2, -0.5 * decay) * window;
  });
}

GridField single_mode(const TorusGrid& grid, const std::array<int, 3>& k, double amplitude) {
  const double unit = grid.frequency_unit();
  const int dim = grid.dim();
  return GridField::from_function(grid, [=](const Frequency& x) {
    double phase = 0.0;
    for (int d = 0; d < dim; ++d) phase += unit * k[d] * x[d];
    return amplitude * std::cos(phase);
  });
}

GridField critical_low_frequency(const TorusGrid& grid, double q, double eps, double amplitude) {
  if (!(q >= 1.0)) throw std::invalid_argument("critical_low_frequency: q must be >= 1");
  const int dim = grid.dim();
  const double a = dim * (1.0 - 1.0 / q) - eps;
  // Fourier-series coefficient of a function with transform ghat: (2 pi)^{n/2} / L^n ghat.
  const double series = std::pow(2.0 * kPi, 0.5 * dim) / std::pow(grid.box_length(), dim);
  auto abs_freq = grid.half_abs_frequency();
  std::vector<Complex> half(grid.half_size(), Complex{});
  for (std::size_t i = 1; i < half.size(); ++i) {
    const double r = abs_freq[i];
    const double cut = chi(2.0 * r);
    if (cut == 0.0) continue;
    const double ghat = amplitude * std::pow(r, -a) * std::exp(-2.0 * r * r) * cut;
    half[i] = raw_coefficient(grid, grid.half_wavenumbers(i), ghat * series);
  }
  return GridField::from_half_spectrum(grid, half);
}

}  // namespace bwl
