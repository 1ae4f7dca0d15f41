#pragma once

// Mild solutions of u'' - Lap u + u' = c u^p:
//   u(t) = D(t)(u0 + u1) + dtD(t) u0 + c int_0^t D(t - tau) u(tau)^p dtau,
// built by Picard iteration on a time-node grid, with an exponential
// time-differencing integrator as an independent cross-check.

#include <optional>
#include <stdexcept>
#include <vector>

#include "bwl/grid.hpp"
#include "bwl/norms.hpp"
#include "bwl/report.hpp"

namespace bwl {

enum class Quadrature { Trapezoid, GaussPanels };

struct SolverConfig {
  double T = 10.0;
  /// Nodes on [0, T]; first 0, last T, strictly increasing.
  std::vector<double> time_grid;
  /// Stops when both the X(T) and the sup-norm change fall below this.
  double picard_tol = 1e-10;
  int max_iters = 50;
  Quadrature quadrature = Quadrature::Trapezoid;
  /// Gauss-Legendre order (2-8, 10, 15 or 20) and panels per node interval.
  int gauss_order = 7;
  int gauss_panels = 1;
  double blowup_threshold = 1e6;
  /// 0 selects ceil((p + 1) / 2).
  int dealias_factor = 0;
  /// Coefficient c of u^p; 0 gives the linear flow.
  double nonlinearity = 1.0;
  /// Step of the exponential integrator used by blowup_probe.
  double etd_dt = 0.01;

  void validate() const;
};

std::vector<double> uniform_time_grid(double T, int steps);
/// {0, t_first, t_first rho, ..., T} with `count` positive nodes.
std::vector<double> geometric_time_grid(double T, double t_first, int count);

struct PicardDiagnostics {
  std::vector<double> x_norms;      // ||u_k||_X, k = 0 is the linear solution
  std::vector<double> differences;  // ||u_{k+1} - u_k||_X
  std::vector<double> ratios;       // differences[k+1] / differences[k] (0 when undefined)
  double residual = 0.0;            // ||u - Psi(u)||_X of the returned iterate
  /// Richardson estimate of the trapezoid error in the Duhamel term (relative L^2).
  double quadrature_error = 0.0;
  int iterations = 0;
  bool converged = false;
  bool non_contracting = false;  // some ratio >= 1
  bool blew_up = false;
  double escape_time = 0.0;
  bool under_resolved = false;  // top-octave energy above 10% at escape
};

struct PicardResult {
  Trajectory trajectory;
  PicardDiagnostics diagnostics;
};

/// int_0^t D(t - tau) source(tau) dtau with the configured quadrature over the
/// source's nodes. Throws for t outside [0, last node].
GridField duhamel_integral(const Trajectory& source, double t, const SolverConfig& cfg);

/// Psi(u) on the nodes of u.
Trajectory picard_map(const Trajectory& u, const GridField& u0, const GridField& u1,
                      const ProblemParams& pp, const SolverConfig& cfg);

PicardResult picard_solve(const GridField& u0, const GridField& u1, const ProblemParams& pp,
                          const SolverConfig& cfg);

struct EtdConfig {
  double dt = 0.01;
  double T = 10.0;
  /// Times to record (multiples of dt, within [0, T]); empty records every step.
  std::vector<double> output_times;
  double blowup_threshold = 1e6;
  double nonlinearity = 1.0;
  int dealias_factor = 0;
};

struct EtdRun {
  /// Recorded up to the escape time when the run blew up.
  Trajectory trajectory;
  bool blew_up = false;
  double escape_time = 0.0;
  bool under_resolved = false;
};

/// Second-order exponential time differencing (Cox-Matthews ETD2RK) on the
/// pair (u, u_t): exact per mode on the linear part, explicit in u^p.
EtdRun etd_oracle(const GridField& u0, const GridField& u1, const ProblemParams& pp, const EtdConfig& cfg);

struct ContractionSample {
  double amplitude = 0.0;
  double horizon = 0.0;
  PicardDiagnostics diagnostics;
};

/// First contraction ratio differences[1] / differences[0] against amplitude
/// and horizon. Scalars: fitted_amplitude_slope (expected p - 1),
/// fitted_horizon_slope, max_ratio. Table "contraction".
ExperimentReport contraction_report(const std::vector<ContractionSample>& runs, const ProblemParams& pp);
ExperimentReport contraction_report(const PicardDiagnostics& diag, const ProblemParams& pp,
                                    const SolverConfig& cfg);

class BlowupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ConfinementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DecayOptions {
  bool blew_up = false;
  /// Largest tolerated outer-shell energy fraction.
  double shell_limit = 1e-6;
  /// Largest tolerated log-log slope of the X profile over the last decade.
  double trend_limit = 0.05;
};

/// Decay of ||u||_{B^0_{r,2}} and ||u||_{B^s_{2,2}} and boundedness of the
/// X-weighted profile. Throws BlowupError if opts.blew_up, ConfinementError if
/// the outer-shell fraction exceeds opts.shell_limit at any node.
ExperimentReport decay_study(const Trajectory& traj, const ProblemParams& pp, const DecayOptions& opts = {});

/// Runs etd_oracle at N and 2N until the cap or cfg.T and compares escape
/// times. Scalars: escaped, escape_time, escape_time_refined,
/// escape_relative_change.
ExperimentReport blowup_probe(const GridField& u0, const GridField& u1, const ProblemParams& pp,
                              const SolverConfig& cfg);

}  // namespace bwl
