#pragma once

// Independent reference computations for the tests: finite differences,
// random expression trees and random band-limited lattice data.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ghg/expr.hpp"
#include "ghg/grid.hpp"

namespace oracle {

inline double central_diff(const ghg::Expr& e, const std::string& var, ghg::Env env, double h) {
  const double x = env.at(var);
  env[var] = x + h;
  const double fp = ghg::evaluate(e, env);
  env[var] = x - h;
  const double fm = ghg::evaluate(e, env);
  return (fp - fm) / (2.0 * h);
}

/// Random trees over {x, y, z} whose values and derivatives stay moderate
/// on [-1, 1]^3. Constants lie in [0, 2] in steps of 1/8.
class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed, bool with_neg = true) : rng_(seed), with_neg_(with_neg) {}

  ghg::Expr operator()(int depth) {
    using ghg::Expr;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
    switch (pick(rng_)) {
      case 0: return Expr::variable(vars_[std::uniform_int_distribution<int>(0, 2)(rng_)]);
      case 1: return Expr::constant(std::uniform_int_distribution<int>(0, 16)(rng_) / 8.0);
      case 2: return Expr::add((*this)(depth - 1), (*this)(depth - 1));
      case 3: return Expr::sub((*this)(depth - 1), (*this)(depth - 1));
      case 4: return Expr::mul((*this)(depth - 1), (*this)(depth - 1));
      case 5: {
        // denominator 1 + d^2 never vanishes
        auto d = (*this)(depth - 1);
        return Expr::div((*this)(depth - 1), Expr::add(Expr::constant(1.0), Expr::pow(d, 2)));
      }
      case 6: {
        // a power directly over a power compounds the degree
        auto b = (*this)(depth - 1);
        if (b.kind() == ghg::NodeKind::pow) return b;
        return Expr::pow(b, std::uniform_int_distribution<unsigned>(0, 3)(rng_));
      }
      case 7: return with_neg_ ? Expr::neg((*this)(depth - 1)) : (*this)(depth - 1);
      case 8: return Expr::call(ghg::Function::sin, (*this)(depth - 1));
      case 9: return Expr::call(ghg::Function::cos, (*this)(depth - 1));
      case 10: return Expr::call(ghg::Function::tanh, (*this)(depth - 1));
      default: return Expr::call(ghg::Function::exp, Expr::call(ghg::Function::tanh, (*this)(depth - 1)));
    }
  }

  ghg::Env point() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {{"x", u(rng_)}, {"y", u(rng_)}, {"z", u(rng_)}};
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  bool with_neg_;
  const char* vars_[3] = {"x", "y", "z"};
};

/// Sum of a few random Fourier modes with |k_a| <= kmax on the grid's box.
inline ghg::GridScalar random_band_limited(const ghg::BoxGrid& grid, std::mt19937_64& rng, int kmax = 3,
                                           int terms = 6) {
  std::uniform_int_distribution<int> kd(-kmax, kmax);
  std::uniform_real_distribution<double> ad(-1.0, 1.0), pd(0.0, 2.0 * std::numbers::pi);
  struct Mode {
    std::vector<int> k;
    double amp, phase;
  };
  std::vector<Mode> modes;
  for (int t = 0; t < terms; ++t) {
    Mode m{{}, ad(rng), pd(rng)};
    for (std::size_t a = 0; a < grid.dimension(); ++a) m.k.push_back(kd(rng));
    modes.push_back(m);
  }
  return ghg::sample(
      [&](std::span<const double> x) {
        double s = 0.0;
        for (const auto& m : modes) {
          double arg = m.phase;
          for (std::size_t a = 0; a < x.size(); ++a)
            arg += 2.0 * std::numbers::pi * m.k[a] * (x[a] - grid.lower(a)) / grid.length(a);
          s += m.amp * std::cos(arg);
        }
        return s;
      },
      grid);
}

/// White-noise lattice values: every mode present, including Nyquist.
inline ghg::GridField random_field(const ghg::BoxGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ghg::GridField X(grid);
  for (auto& c : X.components)
    for (double& v : c.values) v = nd(rng);
  return X;
}

inline double max_abs_diff(const ghg::GridScalar& a, const ghg::GridScalar& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

inline double max_abs(const ghg::GridScalar& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace oracle
