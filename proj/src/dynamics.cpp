#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/LU>

#include "ghg/dynamics.hpp"
#include "ghg/error.hpp"

namespace ghg {

namespace {

std::vector<std::string> flat_variables(const DifferentialGame& g) {
  const auto v = g.variables();
  return {v.begin(), v.end()};
}

// Du augmented with w' = div Du in the last slot.
OdeRhs flow_with_volume(const DifferentialGame& g) {
  const auto n = static_cast<Eigen::Index>(g.dimension());
  auto div = std::make_shared<BoundExpr>(g.divergence_expr(), g.variables());
  return [&g, n, div](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(y.size());
    const Eigen::VectorXd x = y.head(n);
    dy.head(n) = g.gradient_at(x);
    dy[n] = (*div)(std::span<const double>(x.data(), x.size()));
  };
}

}  // namespace

Trajectory integrate(const DifferentialGame& g, const StrategyProfile& x0, const IntegratorConfig& cfg) {
  if (static_cast<std::size_t>(x0.size()) != g.dimension())
    throw std::invalid_argument("initial state has the wrong dimension");
  const auto n = x0.size();
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n + 1);
  y0.head(n) = x0;
  auto sol = solve_ode(flow_with_volume(g), y0, cfg, static_cast<std::size_t>(n));
  Trajectory traj{flat_variables(g), std::move(sol.times), {}, {}, sol.terminated_by};
  for (const auto& y : sol.states) {
    traj.states.push_back(y.head(n));
    traj.log_volume.push_back(y[n]);
  }
  return traj;
}

std::vector<double> liouville_log_volume(const DifferentialGame& g, const Trajectory& traj) {
  const BoundExpr div(g.divergence_expr(), g.variables());
  std::vector<double> w(traj.times.size(), 0.0);
  if (w.empty()) return w;
  double prev = div(std::span<const double>(traj.states[0].data(), traj.states[0].size()));
  for (std::size_t k = 1; k < w.size(); ++k) {
    const auto& x = traj.states[k];
    const double cur = div(std::span<const double>(x.data(), x.size()));
    w[k] = w[k - 1] + 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
    prev = cur;
  }
  return w;
}

double conserved_drift(const Trajectory& traj, const Expr& H) {
  const BoundExpr h(H, traj.variables);
  if (traj.states.empty()) return 0.0;
  auto at = [&](const StrategyProfile& x) { return h(std::span<const double>(x.data(), x.size())); };
  const double h0 = at(traj.states.front());
  double drift = 0.0;
  for (const auto& x : traj.states) drift = std::max(drift, std::abs(at(x) - h0));
  return drift;
}

MonodromyTrack monodromy_log_det(const DifferentialGame& g, const StrategyProfile& x0, const IntegratorConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(g.dimension());
  if (x0.size() != n) throw std::invalid_argument("initial state has the wrong dimension");
  // State layout: x (n), Y (n*n, column-major), accumulated ln det, w.
  const Eigen::Index nn = n * n;
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n + nn + 2);
  y0.head(n) = x0;
  Eigen::Map<Eigen::MatrixXd>(y0.data() + n, n, n).setIdentity();

  OdeRhs rhs = [&g, n, nn](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(y.size());
    const Eigen::VectorXd x = y.head(n);
    dy.head(n) = g.gradient_at(x);
    const Eigen::Map<const Eigen::MatrixXd> Y(y.data() + n, n, n);
    const Eigen::MatrixXd J = g.jacobian_at(x);
    Eigen::Map<Eigen::MatrixXd>(dy.data() + n, n, n) = J * Y;
    dy[n + nn] = 0.0;
    dy[n + nn + 1] = J.trace();
  };
  StepHook restart = [n, nn](double t, Eigen::VectorXd& y) {
    Eigen::Map<Eigen::MatrixXd> Y(y.data() + n, n, n);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Y);
    const Eigen::MatrixXd& U = lu.matrixLU();
    double logdet = 0.0, sign = lu.permutationP().determinant();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = U(i, i);
      if (u == 0.0 || !std::isfinite(u)) throw NumericFailure("singular monodromy factor at t = " + std::to_string(t));
      if (u < 0) sign = -sign;
      logdet += std::log(std::abs(u));
    }
    if (sign < 0) throw NumericFailure("monodromy factor reverses orientation at t = " + std::to_string(t));
    y[n + nn] += logdet;
    Y.setIdentity();
  };

  auto sol = solve_ode(rhs, y0, cfg, static_cast<std::size_t>(n), restart);
  MonodromyTrack out;
  out.trajectory.variables = flat_variables(g);
  out.trajectory.terminated_by = sol.terminated_by;
  out.trajectory.times = std::move(sol.times);
  for (const auto& y : sol.states) {
    out.trajectory.states.push_back(y.head(n));
    out.log_det.push_back(y[n + nn]);
    out.trajectory.log_volume.push_back(y[n + nn + 1]);
  }
  return out;
}

RecurrenceReport recurrence(const Trajectory& traj, double epsilon, double t_min) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("recurrence epsilon must be positive");
  RecurrenceReport r;
  r.epsilon = epsilon;
  r.t_min = t_min;
  r.min_distance_after_t_min = std::numeric_limits<double>::infinity();
  if (traj.states.size() < 2) return r;
  const auto& x0 = traj.states.front();

  bool inside = false;
  double best_d = 0.0, best_t = 0.0;
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const double ta = traj.times[k], tb = traj.times[k + 1];
    if (tb <= t_min) continue;
    const Eigen::VectorXd a = traj.states[k] - x0;
    const Eigen::VectorXd ab = traj.states[k + 1] - traj.states[k];
    const double s_lo = ta >= t_min ? 0.0 : (t_min - ta) / (tb - ta);
    const double len2 = ab.squaredNorm();
    double s = len2 > 0.0 ? -a.dot(ab) / len2 : s_lo;
    s = std::clamp(s, s_lo, 1.0);
    const double d = (a + s * ab).norm();
    const double t = ta + s * (tb - ta);
    r.min_distance_after_t_min = std::min(r.min_distance_after_t_min, d);
    if (d < epsilon) {
      if (!inside || d < best_d) {
        best_d = d;
        best_t = t;
      }
      inside = true;
    } else if (inside) {
      r.return_times.push_back(best_t);
      inside = false;
    }
  }
  if (inside) r.return_times.push_back(best_t);
  r.verdict = !r.return_times.empty();
  return r;
}

}  // namespace ghg
