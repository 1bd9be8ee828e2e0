#pragma once

// Gradient-ascent flow x' = Du(x) and its diagnostics: volume tracking by
// Liouville's formula and by the variational equation, recurrence, and
// critical points of Du.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ghg/game.hpp"

namespace ghg {

enum class Method { rk4, rkf45 };
enum class Termination { t_end, escape };

struct IntegratorConfig {
  Method method = Method::rk4;
  double step = 1e-3;  // rk4 step; initial trial step for rkf45
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double t_end = 50.0;
  double escape_radius = 1e3;
  std::size_t record_stride = 1;

  /// Throws std::invalid_argument on non-positive step, tolerances, t_end or
  /// radius, or a zero stride.
  void validate() const;
};

const char* to_string(Method m);
const char* to_string(Termination t);

// ---- generic ODE core -----------------------------------------------------

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;
/// Called after every accepted step; may rewrite the state in place.
using StepHook = std::function<void(double t, Eigen::VectorXd& y)>;

struct OdeSolution {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  Termination terminated_by = Termination::t_end;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Integrates from t = 0. Escape is tested on the first `escape_dims`
/// entries of the state (all when 0). Records the initial state, every
/// record_stride-th accepted step and the final state. Throws
/// NumericFailure on a non-finite state or step-size underflow.
OdeSolution solve_ode(const OdeRhs& rhs, const Eigen::VectorXd& y0, const IntegratorConfig& cfg,
                      std::size_t escape_dims = 0, const StepHook& hook = {});

// ---- flows of games -------------------------------------------------------

struct Trajectory {
  std::vector<std::string> variables;
  std::vector<double> times;
  std::vector<StrategyProfile> states;
  std::vector<double> log_volume;  // w(t), integrated alongside the state
  Termination terminated_by = Termination::t_end;
};

Trajectory integrate(const DifferentialGame& g, const StrategyProfile& x0, const IntegratorConfig& cfg);

/// w(t) = integral_0^t div Du(x(s)) ds by the trapezoid rule over the
/// recorded samples.
std::vector<double> liouville_log_volume(const DifferentialGame& g, const Trajectory& traj);

/// max_k |H(x_k) - H(x_0)|. Throws EnvError if H uses unknown variables.
double conserved_drift(const Trajectory& traj, const Expr& H);

struct MonodromyTrack {
  Trajectory trajectory;
  std::vector<double> log_det;  // ln det M at trajectory.times
};

/// Co-integrates M' = J(x) M, M(0) = I with the state. M is restarted at the
/// identity after every step and ln det of each one-step factor (LU with
/// partial pivoting) is accumulated, so contracting directions do not
/// underflow against expanding ones. Throws NumericFailure when a factor is
/// singular or reverses orientation.
MonodromyTrack monodromy_log_det(const DifferentialGame& g, const StrategyProfile& x0,
                                 const IntegratorConfig& cfg);

struct RecurrenceReport {
  double epsilon = 1e-2;
  double t_min = 1.0;
  std::vector<double> return_times;
  double min_distance_after_t_min = 0.0;  // +inf when nothing is recorded after t_min
  bool verdict = false;
};

/// A return is one maximal run of consecutive segments (linearly
/// interpolated, restricted to t > t_min) that enter the epsilon-ball about
/// x(0); its time is the moment of closest approach.
RecurrenceReport recurrence(const Trajectory& traj, double epsilon = 1e-2, double t_min = 1.0);

// ---- critical points --------------------------------------------------------

struct NewtonConfig {
  double tol = 1e-12;  // on |Du|_inf
  int max_iter = 50;
  bool fd_fallback = true;  // finite-difference Jacobian when the symbolic one is unusable
};

struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};

struct CriticalPoint {
  StrategyProfile location;
  double gradient_norm = 0.0;             // |Du|_inf at location
  std::vector<EigenRange> block_hessian;  // per player, own-block Hessian of u_m
  bool local_ne_candidate = false;        // every block negative semidefinite within 1e-8
  double flatness = 0.0;                  // max |d^2 u_m / d(w_i^m)^2|
};

struct CriticalSearch {
  std::vector<CriticalPoint> points;
  std::size_t seeds = 0;
  std::size_t converged = 0;  // seeds whose Newton run met the tolerance
};

/// Newton on Du = 0 from Halton seeds in `box`; roots closer than 1e-6 are
/// merged and roots outside the box dropped.
CriticalSearch find_critical_points(const DifferentialGame& g, const Box& box, std::size_t n_seeds = 64,
                                    const NewtonConfig& newton = {}, std::uint64_t seed = 0);

/// max over players m and own coordinates i of |d^2 u_m / d(w_i^m)^2 (p)|.
double ne_flatness_check(const DifferentialGame& g, const StrategyProfile& p);

}  // namespace ghg
