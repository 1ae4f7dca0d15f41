#include "bwl/admissibility.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace bwl {

namespace {

constexpr double kTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Truth values of every inequality; `le` and `lt` decide a <= b and a < b.
struct Flags {
  bool i = false;
  bool two_s_ge_n = false;
  bool ii_lower = false;
  bool ii_strict = true;  // p < 1 + n/(n-2s), only when 2s < n
  bool ii_upper = true;   // p <= 1 + 2/(n-2s), only when 2s < n
  bool iii_first = false;
  bool iii_second = false;
  bool gwp = false;

  bool ii() const { return ii_lower && ii_strict && ii_upper; }
  bool iii() const { return iii_first || iii_second; }
};

template <class T, class Le, class Lt>
Flags evaluate(int n, const T& r, const T& s, const T& p, Le le, Lt lt) {
  const T half = T(1) / 2;
  const T nn = T(n);
  const T decay = half - T(1) / r;  // 1/2 - 1/r
  const T beta = T(n - 1) * decay;
  Flags f;
  f.i = lt(nn * decay, s);
  f.two_s_ge_n = 2 * s >= nn;
  if (s > 0) {
    const T alt = T(1) + r / (2 * s) - T(1) / s;
    f.ii_lower = le(std::min<T>(r / 2, alt), p);
  } else {
    f.ii_lower = true;  // 1 + (r - 2)/(2s) -> -inf as s -> 0+, and is negative for s < 0
  }
  if (!f.two_s_ge_n) {
    const T gap = nn - 2 * s;
    f.ii_strict = lt(p, T(1) + nn / gap);
    f.ii_upper = le(p, T(1) + T(2) / gap);
  }
  f.iii_first = le(T(2 * n - 1) * decay, s);
  if (le(beta, T(1))) {
    f.iii_second = f.two_s_ge_n || le(p, (2 * nn / (nn - 2 * s)) * (T(1) / r + (T(1) - beta) / nn));
  }
  f.gwp = le(T(1) + 2 * r / nn, p);
  return f;
}

Flags evaluate_double(int n, double r, double s, double p) {
  return evaluate<double>(
      n, r, s, p, [](double a, double b) { return a <= b + kTol; },
      [](double a, double b) { return a < b - kTol; });
}

void validate_domain(int n, double r, double p) {
  if (n < 1) throw std::invalid_argument("admissibility: n must be >= 1");
  if (!(r > 2.0) || !std::isfinite(r))
    throw std::invalid_argument("admissibility: r must lie in (2, inf) (got " + fmt(r) + ")");
  if (!std::isfinite(p) || p != std::floor(p))
    throw std::invalid_argument("admissibility: p must be an integer (got " + fmt(p) + ")");
  if (p < 2.0) throw std::invalid_argument("admissibility: p must be >= 2 (got " + fmt(p) + ")");
}

ConditionResult result(bool pass, std::string inequality, double margin) {
  return {pass ? Status::Pass : Status::Fail, std::move(inequality), margin};
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::NotApplicable: return "not-applicable";
  }
  return "?";
}

bool AdmissibilityVerdict::lwp_pass() const {
  return condition_i.status == Status::Pass && condition_ii.status == Status::Pass &&
         condition_iii.status == Status::Pass && integer_p.status == Status::Pass;
}

bool AdmissibilityVerdict::gwp_pass() const { return lwp_pass() && gwp_threshold.status == Status::Pass; }

AdmissibilityVerdict check_lwp(int n, double r, double s, double p) {
  validate_domain(n, r, p);
  const Flags f = evaluate_double(n, r, s, p);
  const double decay = 0.5 - 1.0 / r;
  AdmissibilityVerdict v;
  v.beta = (n - 1) * decay;
  v.fujita = 1.0 + 2.0 * r / n;
  v.two_s_ge_n = f.two_s_ge_n;
  v.integer_p = result(true, "p = " + fmt(p) + " is an integer >= 2", p - 2.0);

  const double i_bound = n * decay;
  v.condition_i = result(f.i, "s > n(1/2 - 1/r): " + fmt(s) + " > " + fmt(i_bound), s - i_bound);

  const double lower = s > 0.0 ? std::min(0.5 * r, 1.0 + r / (2.0 * s) - 1.0 / s) : -kInf;
  std::string ii = "min{r/2, 1 + r/(2s) - 1/s} <= p: " + fmt(lower) + " <= " + fmt(p);
  double ii_margin = p - lower;
  if (!f.two_s_ge_n) {
    const double gap = n - 2.0 * s;
    const double strict = 1.0 + n / gap;
    const double upper = 1.0 + 2.0 / gap;
    ii += "; p < 1 + n/(n-2s): " + fmt(p) + " < " + fmt(strict);
    ii += "; p <= 1 + 2/(n-2s): " + fmt(p) + " <= " + fmt(upper);
    ii_margin = std::min({ii_margin, strict - p, upper - p});
    v.ii_partial = f.ii_strict != f.ii_upper;
  } else {
    ii += " (2s >= n: no upper bound)";
  }
  v.condition_ii = result(f.ii(), ii, ii_margin);

  const double first_bound = (2 * n - 1) * decay;
  const double first_margin = s - first_bound;
  std::string iii = "(2n-1)(1/2 - 1/r) <= s: " + fmt(first_bound) + " <= " + fmt(s);
  double second_margin = 1.0 - v.beta;
  iii += "; or beta <= 1: " + fmt(v.beta) + " <= 1";
  if (!f.two_s_ge_n) {
    const double bound = (2.0 * n / (n - 2.0 * s)) * (1.0 / r + (1.0 - v.beta) / n);
    iii += " and p <= 2n/(n-2s)(1/r + (1-beta)/n): " + fmt(p) + " <= " + fmt(bound);
    second_margin = std::min(second_margin, bound - p);
  }
  v.condition_iii = result(f.iii(), iii, std::max(first_margin, second_margin));
  v.iii_disjunct = f.iii_first ? "first" : (f.iii_second ? "second" : "none");

  v.gwp_threshold = {Status::NotApplicable, "p >= 1 + 2r/n: " + fmt(p) + " >= " + fmt(v.fujita),
                     p - v.fujita};
  return v;
}

AdmissibilityVerdict check_gwp(int n, double r, double s, double p) {
  AdmissibilityVerdict v = check_lwp(n, r, s, p);
  v.gwp_threshold.status = evaluate_double(n, r, s, p).gwp ? Status::Pass : Status::Fail;
  return v;
}

ConditionFlags flags_of(const AdmissibilityVerdict& v) {
  ConditionFlags f;
  f.i = v.condition_i.status == Status::Pass;
  f.ii = v.condition_ii.status == Status::Pass;
  f.iii = v.condition_iii.status == Status::Pass;
  f.gwp = v.gwp_threshold.status == Status::Pass || (v.gwp_threshold.status == Status::NotApplicable &&
                                                     v.gwp_threshold.margin >= -kTol);
  return f;
}

ConditionFlags exact_conditions(int n, double r, double s, int p) {
  validate_domain(n, r, p);
  using Q = boost::multiprecision::cpp_rational;
  const Flags f = evaluate<Q>(
      n, Q(r), Q(s), Q(p), [](const Q& a, const Q& b) { return a <= b; },
      [](const Q& a, const Q& b) { return a < b; });
  return {f.i, f.ii(), f.iii(), f.gwp};
}

SuggestedS suggest_s(int n, double r, int p, double s_max, double step) {
  validate_domain(n, r, p);
  if (!(step > 0.0) || !(s_max >= step)) throw std::invalid_argument("suggest_s: bad scan grid");
  const long count = static_cast<long>(std::floor(s_max / step + 1e-9));
  AdmissibilityVerdict last;
  for (long k = 1; k <= count; ++k) {
    const double s = k * step;
    last = check_lwp(n, r, s, p);
    if (last.lwp_pass()) return {s, {}};
  }
  std::string binding;
  if (last.condition_i.status == Status::Fail) binding = "(i)";
  else if (last.condition_ii.status == Status::Fail) binding = "(ii)";
  else binding = "(iii)";
  return {std::nullopt, binding};
}

}  // namespace bwl
