#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>

#include "ghg/dynamics.hpp"
#include "ghg/error.hpp"

namespace ghg {

namespace {

using Vec = Eigen::VectorXd;

bool finite(const Vec& v) { return v.allFinite(); }

bool escaped(const Vec& y, std::size_t dims, double radius) {
  const auto k = static_cast<Eigen::Index>(dims == 0 ? static_cast<std::size_t>(y.size()) : dims);
  return y.head(k).norm() > radius;
}

void rk4_step(const OdeRhs& f, double t, double h, const Vec& y, Vec& out) {
  Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size());
  f(t, y, k1);
  f(t + 0.5 * h, y + 0.5 * h * k1, k2);
  f(t + 0.5 * h, y + 0.5 * h * k2, k3);
  f(t + h, y + h * k3, k4);
  out = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Runge-Kutta-Fehlberg 4(5) tableau.
constexpr double c2 = 1.0 / 4, c3 = 3.0 / 8, c4 = 12.0 / 13, c5 = 1.0, c6 = 1.0 / 2;
constexpr double a21 = 1.0 / 4;
constexpr double a31 = 3.0 / 32, a32 = 9.0 / 32;
constexpr double a41 = 1932.0 / 2197, a42 = -7200.0 / 2197, a43 = 7296.0 / 2197;
constexpr double a51 = 439.0 / 216, a52 = -8.0, a53 = 3680.0 / 513, a54 = -845.0 / 4104;
constexpr double a61 = -8.0 / 27, a62 = 2.0, a63 = -3544.0 / 2565, a64 = 1859.0 / 4104, a65 = -11.0 / 40;
constexpr double b1 = 25.0 / 216, b3 = 1408.0 / 2565, b4 = 2197.0 / 4104, b5 = -1.0 / 5;
constexpr double e1 = 1.0 / 360, e3 = -128.0 / 4275, e4 = -2197.0 / 75240, e5 = 1.0 / 50, e6 = 2.0 / 55;

// Fourth-order solution in `out`, scaled error norm returned.
double rkf45_step(const OdeRhs& f, double t, double h, const Vec& y, Vec& out, double atol, double rtol) {
  const auto n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n);
  f(t, y, k1);
  f(t + c2 * h, y + h * a21 * k1, k2);
  f(t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3);
  f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
  f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
  f(t + c6 * h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
  out = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5);
  const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6);
  double e = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(out[i]));
    e = std::max(e, std::abs(err[i]) / sc);
  }
  return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(step > 0.0 && std::isfinite(step))) throw std::invalid_argument("step must be positive");
  if (!(abs_tol > 0.0 && rel_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(t_end > 0.0 && std::isfinite(t_end))) throw std::invalid_argument("t_end must be positive");
  if (!(escape_radius > 0.0)) throw std::invalid_argument("escape radius must be positive");
  if (record_stride == 0) throw std::invalid_argument("record stride must be at least 1");
}

const char* to_string(Method m) { return m == Method::rk4 ? "rk4" : "rkf45"; }
const char* to_string(Termination t) { return t == Termination::t_end ? "t_end" : "escape"; }

OdeSolution solve_ode(const OdeRhs& rhs, const Vec& y0, const IntegratorConfig& cfg, std::size_t escape_dims,
                      const StepHook& hook) {
  cfg.validate();
  if (!finite(y0)) throw NumericFailure("non-finite initial state");
  OdeSolution sol;
  sol.times.push_back(0.0);
  sol.states.push_back(y0);

  Vec y = y0, next(y0.size());
  double t = 0.0;
  bool recorded_last = true;
  auto accept = [&](double t_new) {
    t = t_new;
    y.swap(next);
    if (!finite(y)) throw NumericFailure("non-finite state at t = " + std::to_string(t));
    if (hook) hook(t, y);
    ++sol.steps;
    recorded_last = sol.steps % cfg.record_stride == 0;
    if (recorded_last) {
      sol.times.push_back(t);
      sol.states.push_back(y);
    }
    return escaped(y, escape_dims, cfg.escape_radius);
  };

  bool escape = escaped(y, escape_dims, cfg.escape_radius);
  if (cfg.method == Method::rk4) {
    const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.step - 1e-9));
    for (std::size_t i = 1; i <= n_steps && !escape; ++i) {
      // Times come from the step index so they do not accumulate rounding.
      const double t_new = i == n_steps ? cfg.t_end : static_cast<double>(i) * cfg.step;
      rk4_step(rhs, t, t_new - t, y, next);
      escape = accept(t_new);
    }
  } else {
    constexpr double safety = 0.9, alpha = 0.7 / 5.0, beta = 0.4 / 5.0;
    double h = std::min(cfg.step, cfg.t_end);
    double err_prev = 1.0;
    while (t < cfg.t_end && !escape) {
      const bool last = t + h >= cfg.t_end;
      const double step = last ? cfg.t_end - t : h;
      const double err = rkf45_step(rhs, t, step, y, next, cfg.abs_tol, cfg.rel_tol);
      if (err <= 1.0) {
        double factor = err == 0.0 ? 5.0 : safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
        factor = std::clamp(factor, 0.2, 5.0);
        err_prev = std::max(err, 1e-4);
        escape = accept(last ? cfg.t_end : t + step);
        h = step * factor;
      } else {
        ++sol.rejected;
        h = step * std::clamp(safety * std::pow(err, -alpha), 0.1, 0.9);
        if (h <= 1e-14 * std::max(1.0, std::abs(t)))
          throw NumericFailure("step size underflow at t = " + std::to_string(t));
      }
    }
  }
  if (!recorded_last) {
    sol.times.push_back(t);
    sol.states.push_back(y);
  }
  sol.terminated_by = escape ? Termination::escape : Termination::t_end;
  return sol;
}

}  // namespace ghg
