#pragma once

// Hypotheses of the local and global existence theorems as checkable
// inequalities. Floating-point evaluation uses a 1e-12 tolerance (a <= b is
// a <= b + tol, a < b is a < b - tol); an exact rational route re-evaluates
// the same inequalities without rounding.

#include <optional>
#include <string>

namespace bwl {

enum class Status { Pass, Fail, NotApplicable };
const char* to_string(Status s);

struct ConditionResult {
  Status status = Status::NotApplicable;
  std::string inequality;  // the evaluated inequality with numbers substituted
  double margin = 0.0;     // positive inside the admissible region
};

struct AdmissibilityVerdict {
  ConditionResult condition_i;
  ConditionResult condition_ii;
  ConditionResult condition_iii;
  ConditionResult integer_p;
  ConditionResult gwp_threshold;

  double beta = 0.0;
  double fujita = 0.0;
  bool two_s_ge_n = false;
  /// "first", "second" or "none".
  std::string iii_disjunct;
  /// 2s < n and exactly one of p < 1 + n/(n-2s), p <= 1 + 2/(n-2s) holds.
  bool ii_partial = false;

  bool lwp_pass() const;
  bool gwp_pass() const;
};

/// Conditions (i)-(iii). Throws std::invalid_argument for n < 1, r outside
/// (2, inf), or p not an integer >= 2.
AdmissibilityVerdict check_lwp(int n, double r, double s, double p);
/// check_lwp plus p >= 1 + 2r/n.
AdmissibilityVerdict check_gwp(int n, double r, double s, double p);

struct ConditionFlags {
  bool i = false;
  bool ii = false;
  bool iii = false;
  bool gwp = false;
  bool operator==(const ConditionFlags&) const = default;
};

ConditionFlags flags_of(const AdmissibilityVerdict& v);
/// The same inequalities in exact rational arithmetic on the (exactly
/// representable) binary values of r and s.
ConditionFlags exact_conditions(int n, double r, double s, int p);

struct SuggestedS {
  std::optional<double> s;
  /// Condition failing at the largest scanned s when none passes.
  std::string binding;
};

/// Smallest s on the grid {k * step : 1 <= k <= s_max / step} passing check_lwp.
SuggestedS suggest_s(int n, double r, int p, double s_max = 40.0, double step = 1.0 / 64.0);

}  // namespace bwl
