#pragma once

// Periodic torus discretization of R^n and the Fourier machinery built on it.
//
// Conventions:
//   * the torus is [-L/2, L/2)^n sampled at x_j = -L/2 + j*h, h = L/N;
//   * lattice frequencies are xi_k = 2*pi*k/L with k in [-N/2, N/2);
//   * SpectralField holds the symmetric-normalized transform
//       fhat(xi_k) = (2 pi)^{-n/2} h^n sum_j exp(-i x_j . xi_k) f(x_j),
//     which converges to the continuum transform as N, L grow.
//
// Real fields carry a lazily computed, shared r2c spectrum (raw, unnormalized
// FFTW layout). Multipliers and products work on that half spectrum.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace bwl {

using Complex = std::complex<double>;
using Frequency = std::array<double, 3>;

class TorusGrid {
 public:
  TorusGrid(int dim, int points_per_axis, double box_length);

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  double box_length() const { return length_; }
  double spacing() const { return length_ / n_; }
  /// Smallest nonzero frequency magnitude, 2 pi / L.
  double frequency_unit() const;
  /// pi N / L, the largest representable frequency per axis.
  double max_frequency() const;
  /// h^n, the real-space quadrature weight.
  double cell_volume() const;
  /// (2 pi / L)^n, the frequency-space quadrature weight.
  double dual_cell_volume() const;

  std::size_t size() const;
  /// Number of complex entries in the r2c layout: N^(n-1) * (N/2 + 1).
  std::size_t half_size() const;
  std::array<int, 3> shape() const;

  /// Signed wavenumber of an FFT-ordered index on a full axis.
  int wavenumber(int index) const { return index < n_ / 2 ? index : index - n_; }
  double coordinate(int index) const { return -0.5 * length_ + index * spacing(); }

  /// Wavenumber vector for entry `flat` of the r2c layout.
  std::array<int, 3> half_wavenumbers(std::size_t flat) const;
  /// Real-space point for entry `flat` of the sample array.
  Frequency point(std::size_t flat) const;

  /// |xi| for every entry of the r2c layout (cached, shared between copies).
  std::span<const double> half_abs_frequency() const { return *abs_freq_; }
  /// Multiplicity of each r2c entry in the full spectrum (1 or 2).
  std::span<const double> half_multiplicity() const { return *multiplicity_; }

  bool operator==(const TorusGrid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
  }

 private:
  int dim_;
  int n_;
  double length_;
  std::shared_ptr<const std::vector<double>> abs_freq_;
  std::shared_ptr<const std::vector<double>> multiplicity_;
};

/// Validating factory: n in {1,2,3}, N even and >= 8, L > 0.
TorusGrid make_grid(int dim, int points_per_axis, double box_length);

class GridField {
 public:
  GridField(TorusGrid grid, std::vector<double> values);

  static GridField zeros(const TorusGrid& grid);
  static GridField constant(const TorusGrid& grid, double value);
  static GridField from_function(const TorusGrid& grid,
                                 const std::function<double(const Frequency&)>& f);
  /// Inverse r2c of a raw (unnormalized FFTW layout) half spectrum.
  static GridField from_half_spectrum(const TorusGrid& grid, std::span<const Complex> half);

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Raw r2c spectrum, computed once and shared between copies.
  std::span<const Complex> half_spectrum() const;

  double mean() const;
  double max_abs() const;

  GridField operator+(const GridField& other) const;
  GridField operator-(const GridField& other) const;
  GridField operator*(double scale) const;
  friend GridField operator*(double scale, const GridField& f) { return f * scale; }

 private:
  struct SpectrumCache {
    std::once_flag once;
    std::vector<Complex> half;
  };

  TorusGrid grid_;
  std::vector<double> values_;
  std::shared_ptr<SpectrumCache> cache_;
};

class SpectralField {
 public:
  /// `coeffs` in FFT order (row-major, last axis fastest), normalized as above.
  SpectralField(TorusGrid grid, std::vector<Complex> coeffs);

  const TorusGrid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  /// Coefficient at signed wavenumbers k (unused trailing entries ignored).
  Complex at(const std::array<int, 3>& k) const;
  /// max |c(-k) - conj c(k)|.
  double hermitian_defect() const;

 private:
  std::size_t flat_index(const std::array<int, 3>& k) const;

  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField forward_transform(const GridField& f);
/// Real inverse. Rejects input whose Hermitian defect exceeds 1e-10 (relative
/// to max(1, max |c|)).
GridField inverse_transform(const SpectralField& spectrum);
/// Complex inverse for spectra that need not be Hermitian.
std::vector<Complex> inverse_transform_complex(const SpectralField& spectrum);

using Multiplier = std::function<double(const Frequency& xi)>;
using RadialMultiplier = std::function<double(double abs_xi)>;

/// Samples a multiplier on the r2c layout. `m` must be even in xi. Throws if a
/// value is not finite.
std::vector<double> sample_multiplier(const TorusGrid& grid, const Multiplier& m);
std::vector<double> sample_radial(const TorusGrid& grid, const RadialMultiplier& m);

/// F^{-1}[m(xi) fhat(xi)] for a real, even symbol m.
GridField apply_multiplier(const Multiplier& m, const GridField& f);
GridField apply_radial_multiplier(const RadialMultiplier& m, const GridField& f);
/// Same with a pre-sampled symbol on the r2c layout.
GridField apply_sampled_multiplier(std::span<const double> symbol, const GridField& f);

/// Products computed on a grid zero-padded by `pad_factor`, then truncated
/// back. Nyquist modes of the inputs are dropped before padding.
GridField dealiased_product(const GridField& f, const GridField& g, int pad_factor = 2);
/// u^p with padding factor ceil((p + 1) / 2), or `pad_factor` when nonzero.
GridField dealiased_power(const GridField& u, int p, int pad_factor = 0);
int power_pad_factor(int p);

/// Spectral prolongation onto a grid with `factor` times more points per axis.
GridField refine(const GridField& f, int factor);

/// Fraction of sum |u|^2 located in the outer 10% shell of the box
/// (points with max_i |x_i| >= 0.4 L).
double outer_shell_fraction(const GridField& f);
/// Fraction of spectral energy in the top octave, |xi| > max_frequency / 2.
double top_octave_fraction(const GridField& f);

}  // namespace bwl
