#include "bwl/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bwl {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i)
    fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - fit.intercept - fit.slope * x[i]));
  return fit;
}

double japanese(double t) { return std::sqrt(1.0 + t * t); }

LineFit fit_decay_exponent(std::span<const double> t, std::span<const double> values,
                           double t_lo, double t_hi) {
  if (t.size() != values.size()) throw std::invalid_argument("fit_decay_exponent: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi || !(values[i] > 0.0) || !std::isfinite(values[i])) continue;
    lx.push_back(std::log(japanese(t[i])));
    ly.push_back(std::log(values[i]));
  }
  return fit_line(lx, ly);
}

std::pair<double, double> last_decade(std::span<const double> t) {
  if (t.empty()) throw std::invalid_argument("last_decade: empty grid");
  const double hi = *std::max_element(t.begin(), t.end());
  return {hi / 10.0, hi};
}

}  // namespace bwl
