#include "bwl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bwl/fft.hpp"

namespace bwl {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

TorusGrid::TorusGrid(int dim, int points_per_axis, double box_length)
    : dim_(dim), n_(points_per_axis), length_(box_length) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("TorusGrid: dimension must be 1, 2 or 3 (got " +
                                std::to_string(dim) + ")");
  if (points_per_axis % 2 != 0)
    throw std::invalid_argument("TorusGrid: points per axis must be even (got " +
                                std::to_string(points_per_axis) + ")");
  if (points_per_axis < 8)
    throw std::invalid_argument("TorusGrid: points per axis must be at least 8");
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw std::invalid_argument("TorusGrid: box length must be positive and finite");

  const std::size_t hs = half_size();
  std::vector<double> abs_freq(hs);
  std::vector<double> mult(hs);
  const double unit = frequency_unit();
  for (std::size_t i = 0; i < hs; ++i) {
    auto k = half_wavenumbers(i);
    double s = 0.0;
    for (int d = 0; d < dim_; ++d) s += (unit * k[d]) * (unit * k[d]);
    abs_freq[i] = std::sqrt(s);
    const int last = k[dim_ - 1];
    mult[i] = (last == 0 || last == n_ / 2) ? 1.0 : 2.0;
  }
  abs_freq_ = std::make_shared<const std::vector<double>>(std::move(abs_freq));
  multiplicity_ = std::make_shared<const std::vector<double>>(std::move(mult));
}

double TorusGrid::frequency_unit() const { return 2.0 * kPi / length_; }
double TorusGrid::max_frequency() const { return kPi * n_ / length_; }
double TorusGrid::cell_volume() const { return std::pow(spacing(), dim_); }
double TorusGrid::dual_cell_volume() const { return std::pow(frequency_unit(), dim_); }
std::size_t TorusGrid::size() const { return ipow(static_cast<std::size_t>(n_), dim_); }
std::size_t TorusGrid::half_size() const { return fft::half_size(dim_, n_); }

std::array<int, 3> TorusGrid::shape() const {
  std::array<int, 3> s{1, 1, 1};
  for (int d = 0; d < dim_; ++d) s[d] = n_;
  return s;
}

std::array<int, 3> TorusGrid::half_wavenumbers(std::size_t flat) const {
  const std::size_t half_n = static_cast<std::size_t>(n_ / 2 + 1);
  std::array<int, 3> k{0, 0, 0};
  k[dim_ - 1] = static_cast<int>(flat % half_n);
  flat /= half_n;
  for (int d = dim_ - 2; d >= 0; --d) {
    k[d] = wavenumber(static_cast<int>(flat % n_));
    flat /= n_;
  }
  return k;
}

Frequency TorusGrid::point(std::size_t flat) const {
  Frequency x{0.0, 0.0, 0.0};
  for (int d = dim_ - 1; d >= 0; --d) {
    x[d] = coordinate(static_cast<int>(flat % n_));
    flat /= n_;
  }
  return x;
}

TorusGrid make_grid(int dim, int points_per_axis, double box_length) {
  return TorusGrid(dim, points_per_axis, box_length);
}

// ---------------------------------------------------------------------------

GridField::GridField(TorusGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)), cache_(std::make_shared<SpectrumCache>()) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("GridField: sample count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("GridField: non-finite sample");
}

GridField GridField::zeros(const TorusGrid& grid) {
  return GridField(grid, std::vector<double>(grid.size(), 0.0));
}

GridField GridField::constant(const TorusGrid& grid, double value) {
  return GridField(grid, std::vector<double>(grid.size(), value));
}

GridField GridField::from_function(const TorusGrid& grid,
                                   const std::function<double(const Frequency&)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.point(i));
  return GridField(grid, std::move(v));
}

GridField GridField::from_half_spectrum(const TorusGrid& grid, std::span<const Complex> half) {
  std::vector<double> v(grid.size());
  fft::c2r(grid.dim(), grid.points_per_axis(), half, v);
  const double inv = 1.0 / static_cast<double>(grid.size());
  for (double& x : v) x *= inv;
  return GridField(grid, std::move(v));
}

std::span<const Complex> GridField::half_spectrum() const {
  std::call_once(cache_->once, [this] {
    cache_->half.resize(grid_.half_size());
    fft::r2c(grid_.dim(), grid_.points_per_axis(), values_, cache_->half);
  });
  return cache_->half;
}

double GridField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridField GridField::operator+(const GridField& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("GridField: grid mismatch");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return GridField(grid_, std::move(v));
}

GridField GridField::operator-(const GridField& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("GridField: grid mismatch");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.values_[i];
  return GridField(grid_, std::move(v));
}

GridField GridField::operator*(double scale) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= scale;
  return GridField(grid_, std::move(v));
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(TorusGrid grid, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size())
    throw std::invalid_argument("SpectralField: coefficient count does not match grid");
}

std::size_t SpectralField::flat_index(const std::array<int, 3>& k) const {
  const int n = grid_.points_per_axis();
  std::size_t flat = 0;
  for (int d = 0; d < grid_.dim(); ++d) {
    if (k[d] < -n / 2 || k[d] >= n / 2) throw std::out_of_range("SpectralField: wavenumber");
    flat = flat * n + static_cast<std::size_t>(k[d] >= 0 ? k[d] : n + k[d]);
  }
  return flat;
}

Complex SpectralField::at(const std::array<int, 3>& k) const { return coeffs_[flat_index(k)]; }

double SpectralField::hermitian_defect() const {
  const int n = grid_.points_per_axis();
  const int dim = grid_.dim();
  double defect = 0.0;
  for (std::size_t flat = 0; flat < coeffs_.size(); ++flat) {
    std::size_t rem = flat;
    std::size_t mirror = 0;
    std::size_t stride = 1;
    for (int d = 0; d < dim; ++d) {
      std::size_t i = rem % n;
      rem /= n;
      mirror += ((n - i) % n) * stride;
      stride *= n;
    }
    defect = std::max(defect, std::abs(coeffs_[mirror] - std::conj(coeffs_[flat])));
  }
  return defect;
}

namespace {

// (-1)^(k_1 + ... + k_n) for the FFT-ordered entry `flat`: the phase from
// placing the first sample at -L/2.
double origin_phase(const TorusGrid& grid, std::size_t flat) {
  const int n = grid.points_per_axis();
  int parity = 0;
  for (int d = 0; d < grid.dim(); ++d) {
    parity += grid.wavenumber(static_cast<int>(flat % n));
    flat /= n;
  }
  return (parity % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

SpectralField forward_transform(const GridField& f) {
  const TorusGrid& grid = f.grid();
  std::vector<Complex> in(f.values().begin(), f.values().end());
  std::vector<Complex> out(grid.size());
  fft::c2c(grid.dim(), grid.points_per_axis(), in, out, -1);
  const double norm = std::pow(2.0 * kPi, -0.5 * grid.dim()) * grid.cell_volume();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= norm * origin_phase(grid, i);
  return SpectralField(grid, std::move(out));
}

std::vector<Complex> inverse_transform_complex(const SpectralField& spectrum) {
  const TorusGrid& grid = spectrum.grid();
  std::vector<Complex> in(spectrum.coeffs().begin(), spectrum.coeffs().end());
  for (std::size_t i = 0; i < in.size(); ++i) in[i] *= origin_phase(grid, i);
  std::vector<Complex> out(grid.size());
  fft::c2c(grid.dim(), grid.points_per_axis(), in, out, +1);
  const double norm = std::pow(2.0 * kPi, -0.5 * grid.dim()) * grid.dual_cell_volume();
  for (Complex& c : out) c *= norm;
  return out;
}

GridField inverse_transform(const SpectralField& spectrum) {
  double scale = 1.0;
  for (const Complex& c : spectrum.coeffs()) scale = std::max(scale, std::abs(c));
  if (spectrum.hermitian_defect() > 1e-10 * scale)
    throw std::invalid_argument("inverse_transform: spectrum is not Hermitian; real output impossible");
  auto values = inverse_transform_complex(spectrum);
  std::vector<double> re(values.size());
  for (std::size_t i = 0; i < re.size(); ++i) re[i] = values[i].real();
  return GridField(spectrum.grid(), std::move(re));
}

// ---------------------------------------------------------------------------

std::vector<double> sample_multiplier(const TorusGrid& grid, const Multiplier& m) {
  std::vector<double> symbol(grid.half_size());
  const double unit = grid.frequency_unit();
  for (std::size_t i = 0; i < symbol.size(); ++i) {
    auto k = grid.half_wavenumbers(i);
    Frequency xi{unit * k[0], unit * k[1], unit * k[2]};
    for (int d = grid.dim(); d < 3; ++d) xi[d] = 0.0;
    symbol[i] = m(xi);
    if (!std::isfinite(symbol[i]))
      throw std::invalid_argument("multiplier is not finite at a lattice frequency");
  }
  return symbol;
}

std::vector<double> sample_radial(const TorusGrid& grid, const RadialMultiplier& m) {
  auto abs_freq = grid.half_abs_frequency();
  std::vector<double> symbol(abs_freq.size());
  for (std::size_t i = 0; i < symbol.size(); ++i) {
    symbol[i] = m(abs_freq[i]);
    if (!std::isfinite(symbol[i]))
      throw std::invalid_argument("multiplier is not finite at a lattice frequency");
  }
  return symbol;
}

GridField apply_sampled_multiplier(std::span<const double> symbol, const GridField& f) {
  const TorusGrid& grid = f.grid();
  if (symbol.size() != grid.half_size())
    throw std::invalid_argument("apply_sampled_multiplier: symbol size mismatch");
  auto spec = f.half_spectrum();
  std::vector<Complex> out(spec.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec[i] * symbol[i];
  return GridField::from_half_spectrum(grid, out);
}

GridField apply_multiplier(const Multiplier& m, const GridField& f) {
  return apply_sampled_multiplier(sample_multiplier(f.grid(), m), f);
}

GridField apply_radial_multiplier(const RadialMultiplier& m, const GridField& f) {
  return apply_sampled_multiplier(sample_radial(f.grid(), m), f);
}

// ---------------------------------------------------------------------------

int power_pad_factor(int p) { return (p + 2) / 2; }  // ceil((p + 1) / 2)

namespace {

std::vector<double> to_fine_samples(const GridField& f, int fine_n) {
  const TorusGrid& g = f.grid();
  auto padded = fft::pad_half(g, f.half_spectrum(), fine_n);
  std::vector<double> out(ipow(static_cast<std::size_t>(fine_n), g.dim()));
  fft::c2r(g.dim(), fine_n, padded, out);
  const double inv = 1.0 / static_cast<double>(out.size());
  for (double& v : out) v *= inv;
  return out;
}

GridField from_fine_samples(const TorusGrid& grid, std::span<const double> fine, int fine_n) {
  std::vector<Complex> fine_half(fft::half_size(grid.dim(), fine_n));
  fft::r2c(grid.dim(), fine_n, fine, fine_half);
  auto coarse = fft::truncate_half(grid, fine_half, fine_n);
  return GridField::from_half_spectrum(grid, coarse);
}

}  // namespace

GridField dealiased_product(const GridField& f, const GridField& g, int pad_factor) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("dealiased_product: grid mismatch");
  if (pad_factor < 1) throw std::invalid_argument("dealiased_product: pad factor must be >= 1");
  const int fine_n = pad_factor * f.grid().points_per_axis();
  auto a = to_fine_samples(f, fine_n);
  auto b = to_fine_samples(g, fine_n);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return from_fine_samples(f.grid(), a, fine_n);
}

GridField dealiased_power(const GridField& u, int p, int pad_factor) {
  if (p < 1) throw std::invalid_argument("dealiased_power: exponent must be >= 1");
  if (pad_factor < 0) throw std::invalid_argument("dealiased_power: pad factor must be >= 0");
  const int fine_n = (pad_factor == 0 ? power_pad_factor(p) : pad_factor) * u.grid().points_per_axis();
  auto a = to_fine_samples(u, fine_n);
  for (double& v : a) {
    double base = v;
    double acc = base;
    for (int i = 1; i < p; ++i) acc *= base;
    v = acc;
  }
  return from_fine_samples(u.grid(), a, fine_n);
}

GridField refine(const GridField& f, int factor) {
  if (factor < 1) throw std::invalid_argument("refine: factor must be >= 1");
  const TorusGrid& g = f.grid();
  const int fine_n = factor * g.points_per_axis();
  TorusGrid fine(g.dim(), fine_n, g.box_length());
  return GridField(fine, to_fine_samples(f, fine_n));
}

double outer_shell_fraction(const GridField& f) {
  const TorusGrid& grid = f.grid();
  const double edge = 0.4 * grid.box_length();
  double total = 0.0;
  double shell = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double e = f[i] * f[i];
    total += e;
    auto x = grid.point(i);
    double r = 0.0;
    for (int d = 0; d < grid.dim(); ++d) r = std::max(r, std::abs(x[d]));
    if (r >= edge) shell += e;
  }
  return total > 0.0 ? shell / total : 0.0;
}

double top_octave_fraction(const GridField& f) {
  const TorusGrid& grid = f.grid();
  auto spec = f.half_spectrum();
  auto abs_freq = grid.half_abs_frequency();
  auto mult = grid.half_multiplicity();
  const double cut = 0.5 * grid.max_frequency();
  double total = 0.0;
  double top = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double e = mult[i] * std::norm(spec[i]);
    total += e;
    if (abs_freq[i] > cut) top += e;
  }
  return total > 0.0 ? top / total : 0.0;
}

}  // namespace bwl
