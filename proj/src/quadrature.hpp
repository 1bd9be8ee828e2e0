#pragma once

#include <array>
#include <cmath>

#include "ghg/error.hpp"

namespace ghg::detail {

// Adaptive Gauss-Kronrod (7/15) with an absolute error target, bisecting
// until each panel meets its share of the tolerance.
template <class F>
class GaussKronrod15 {
 public:
  GaussKronrod15(F f, double abs_tol, int max_depth = 40)
      : f_(std::move(f)), abs_tol_(abs_tol), max_depth_(max_depth) {}

  double integrate(double a, double b) { return panel(a, b, abs_tol_, 0); }

 private:
  static constexpr std::array<double, 8> xgk{
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, 8> wgk{
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg{
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  double panel(double a, double b, double tol, int depth) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f_(c);
    double kronrod = wgk[7] * fc;
    double gauss = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
      const double s = f_(c - h * xgk[j]) + f_(c + h * xgk[j]);
      kronrod += wgk[j] * s;
      if (j % 2 == 1) gauss += wg[j / 2] * s;
    }
    kronrod *= h;
    gauss *= h;
    const double err = std::abs(kronrod - gauss);
    if (!std::isfinite(kronrod)) throw NumericFailure("quadrature: non-finite integrand");
    if (err <= tol) return kronrod;
    if (depth >= max_depth_) throw NumericFailure("quadrature did not converge");
    return panel(a, c, 0.5 * tol, depth + 1) + panel(c, b, 0.5 * tol, depth + 1);
  }

  F f_;
  double abs_tol_;
  int max_depth_;
};

}  // namespace ghg::detail
