#include "bwl/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "bwl/grid.hpp"

namespace bwl::fft {
namespace {

enum class Kind { R2C, C2R, C2C_FWD, C2C_BWD };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, int dim, int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(kind, dim, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    int dims[3] = {n, n, n};
    std::size_t real_size = 1;
    for (int d = 0; d < dim; ++d) real_size *= static_cast<std::size_t>(n);
    std::size_t cplx_size = kind == Kind::R2C || kind == Kind::C2R ? half_size(dim, n) : real_size;

    // Planning with FFTW_ESTIMATE never touches the arrays' contents.
    auto* rbuf = static_cast<double*>(fftw_malloc(sizeof(double) * real_size));
    auto* cbuf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * cplx_size));
    auto* cbuf2 = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * real_size));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::R2C: plan = fftw_plan_dft_r2c(dim, dims, rbuf, cbuf, flags); break;
      case Kind::C2R: plan = fftw_plan_dft_c2r(dim, dims, cbuf, rbuf, flags); break;
      case Kind::C2C_FWD: plan = fftw_plan_dft(dim, dims, cbuf, cbuf2, FFTW_FORWARD, flags); break;
      case Kind::C2C_BWD: plan = fftw_plan_dft(dim, dims, cbuf, cbuf2, FFTW_BACKWARD, flags); break;
    }
    fftw_free(rbuf);
    fftw_free(cbuf);
    fftw_free(cbuf2);
    if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<Kind, int, int>, fftw_plan> plans_;
};

std::size_t full_size(int dim, int n) {
  std::size_t s = 1;
  for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(n);
  return s;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::size_t half_size(int dim, int n) {
  return full_size(dim - 1, n) * static_cast<std::size_t>(n / 2 + 1);
}

void r2c(int dim, int n, std::span<const double> in, std::span<Complex> out) {
  if (in.size() != full_size(dim, n) || out.size() != half_size(dim, n))
    throw std::invalid_argument("fft::r2c: buffer size mismatch");
  fftw_plan plan = PlanCache::instance().get(Kind::R2C, dim, n);
  fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()), as_fftw(out.data()));
}

void c2r(int dim, int n, std::span<const Complex> in, std::span<double> out) {
  if (in.size() != half_size(dim, n) || out.size() != full_size(dim, n))
    throw std::invalid_argument("fft::c2r: buffer size mismatch");
  std::vector<Complex> scratch(in.begin(), in.end());
  fftw_plan plan = PlanCache::instance().get(Kind::C2R, dim, n);
  fftw_execute_dft_c2r(plan, as_fftw(scratch.data()), out.data());
}

void c2c(int dim, int n, std::span<const Complex> in, std::span<Complex> out, int sign) {
  if (in.size() != full_size(dim, n) || out.size() != full_size(dim, n))
    throw std::invalid_argument("fft::c2c: buffer size mismatch");
  std::vector<Complex> scratch(in.begin(), in.end());
  fftw_plan plan = PlanCache::instance().get(sign < 0 ? Kind::C2C_FWD : Kind::C2C_BWD, dim, n);
  fftw_execute_dft(plan, as_fftw(scratch.data()), as_fftw(out.data()));
}

namespace {

// Visits every non-Nyquist entry of the coarse half layout together with the
// flat index of the same wavenumber in the fine half layout.
template <class Fn>
void for_each_shared_mode(const TorusGrid& coarse, int fine_n, Fn&& fn) {
  const int dim = coarse.dim();
  const int n = coarse.points_per_axis();
  const int half_n = n / 2 + 1;
  const int fine_half = fine_n / 2 + 1;
  if (fine_n < n) throw std::invalid_argument("fft: fine grid smaller than coarse grid");

  auto fine_axis = [&](int i) {
    int k = i < n / 2 ? i : i - n;
    return k >= 0 ? k : fine_n + k;
  };

  std::size_t flat = 0;
  if (dim == 1) {
    for (int c = 0; c < half_n; ++c, ++flat)
      if (c != n / 2) fn(flat, static_cast<std::size_t>(c));
  } else if (dim == 2) {
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < half_n; ++c, ++flat) {
        if (a == n / 2 || c == n / 2) continue;
        fn(flat, static_cast<std::size_t>(fine_axis(a)) * fine_half + c);
      }
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < half_n; ++c, ++flat) {
          if (a == n / 2 || b == n / 2 || c == n / 2) continue;
          std::size_t fi = (static_cast<std::size_t>(fine_axis(a)) * fine_n + fine_axis(b)) *
                               fine_half + c;
          fn(flat, fi);
        }
  }
}

double volume_ratio(int dim, int fine_n, int n) {
  double r = 1.0;
  for (int d = 0; d < dim; ++d) r *= static_cast<double>(fine_n) / n;
  return r;
}

}  // namespace

std::vector<Complex> pad_half(const TorusGrid& coarse, std::span<const Complex> half, int fine_n) {
  if (half.size() != coarse.half_size()) throw std::invalid_argument("fft::pad_half: size mismatch");
  std::vector<Complex> fine(half_size(coarse.dim(), fine_n), Complex{});
  const double scale = volume_ratio(coarse.dim(), fine_n, coarse.points_per_axis());
  for_each_shared_mode(coarse, fine_n,
                       [&](std::size_t ci, std::size_t fi) { fine[fi] = half[ci] * scale; });
  return fine;
}

std::vector<Complex> truncate_half(const TorusGrid& coarse, std::span<const Complex> fine_half,
                                   int fine_n) {
  if (fine_half.size() != half_size(coarse.dim(), fine_n))
    throw std::invalid_argument("fft::truncate_half: size mismatch");
  std::vector<Complex> out(coarse.half_size(), Complex{});
  const double scale = 1.0 / volume_ratio(coarse.dim(), fine_n, coarse.points_per_axis());
  for_each_shared_mode(coarse, fine_n,
                       [&](std::size_t ci, std::size_t fi) { out[ci] = fine_half[fi] * scale; });
  return out;
}

}  // namespace bwl::fft
