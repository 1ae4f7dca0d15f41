#pragma once

// Thin FFTW layer. Plans are created once per (kind, dim, N) under a lock and
// executed through the new-array interface, so callers own their buffers and
// concurrent execution is safe. All transforms are raw (unnormalized).

#include <complex>
#include <span>
#include <vector>

namespace bwl {
class TorusGrid;
}

namespace bwl::fft {

using Complex = std::complex<double>;

void r2c(int dim, int n, std::span<const double> in, std::span<Complex> out);
/// Input is copied; `in` is left untouched.
void c2r(int dim, int n, std::span<const Complex> in, std::span<double> out);
/// sign = -1 forward, +1 backward.
void c2c(int dim, int n, std::span<const Complex> in, std::span<Complex> out, int sign);

std::size_t half_size(int dim, int n);

/// Embeds a raw half spectrum of `coarse` into the raw half spectrum of the
/// same-dimensional grid with `fine_n` points per axis. Nyquist entries are
/// dropped. Scaled so c2r / fine_n^dim yields samples of the same function.
std::vector<Complex> pad_half(const TorusGrid& coarse, std::span<const Complex> half, int fine_n);
/// Inverse of pad_half on the modes |k| < N/2; coarse Nyquist entries are zero.
std::vector<Complex> truncate_half(const TorusGrid& coarse, std::span<const Complex> fine_half,
                                   int fine_n);

}  // namespace bwl::fft
