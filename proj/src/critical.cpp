#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ghg/dynamics.hpp"
#include "ghg/error.hpp"

namespace ghg {

namespace {

constexpr double kMergeRadius = 1e-6;
constexpr double kNsdSlack = 1e-8;

Eigen::MatrixXd fd_jacobian(const DifferentialGame& g, const Eigen::VectorXd& x) {
  const auto n = x.size();
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (g.gradient_at(xp) - g.gradient_at(xm)) / (2.0 * h);
  }
  return J;
}

Eigen::MatrixXd safe_jacobian(const DifferentialGame& g, const Eigen::VectorXd& x, bool fd_fallback) {
  try {
    Eigen::MatrixXd J = g.jacobian_at(x);
    if (J.allFinite()) return J;
  } catch (const DomainError&) {
    if (!fd_fallback) throw;
  }
  if (!fd_fallback) throw NumericFailure("non-finite Jacobian");
  return fd_jacobian(g, x);
}

// Returns true when |Du|_inf <= tol at the end. Iterates past the tolerance
// while steps keep shrinking, so singular roots are approached closely
// enough to merge.
bool newton(const DifferentialGame& g, Eigen::VectorXd& x, const NewtonConfig& cfg) {
  double prev_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd f = g.gradient_at(x);
    if (!f.allFinite()) return false;
    if (f.lpNorm<Eigen::Infinity>() == 0.0) return true;
    const Eigen::MatrixXd J = safe_jacobian(g, x, cfg.fd_fallback);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    const Eigen::VectorXd dx =
        lu.isInvertible() ? Eigen::VectorXd(lu.solve(-f)) : Eigen::VectorXd(J.completeOrthogonalDecomposition().solve(-f));
    if (!dx.allFinite()) return false;
    x += dx;
    const double step = dx.norm();
    const bool small = f.lpNorm<Eigen::Infinity>() <= cfg.tol;
    if (step <= 1e-15 * (1.0 + x.norm()) || (small && step >= prev_step)) break;
    prev_step = step;
  }
  const Eigen::VectorXd f = g.gradient_at(x);
  return f.allFinite() && f.lpNorm<Eigen::Infinity>() <= cfg.tol;
}

bool inside(const Box& box, const Eigen::VectorXd& x) {
  for (std::size_t a = 0; a < box.dimension(); ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    if (x[i] < box.lower[a] || x[i] > box.upper[a]) return false;
  }
  return true;
}

CriticalPoint annotate(const DifferentialGame& g, const Eigen::VectorXd& x) {
  CriticalPoint cp;
  cp.location = x;
  cp.gradient_norm = g.gradient_at(x).lpNorm<Eigen::Infinity>();
  const Eigen::MatrixXd J = g.jacobian_at(x);
  cp.local_ne_candidate = true;
  for (std::size_t m = 0; m < g.player_count(); ++m) {
    const auto off = static_cast<Eigen::Index>(g.offset(m));
    const auto len = static_cast<Eigen::Index>(g.players()[m].vars.size());
    const Eigen::MatrixXd H = J.block(off, off, len, len);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
    const EigenRange r{es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
    cp.block_hessian.push_back(r);
    if (r.max > kNsdSlack) cp.local_ne_candidate = false;
  }
  cp.flatness = J.diagonal().cwiseAbs().maxCoeff();
  return cp;
}

}  // namespace

CriticalSearch find_critical_points(const DifferentialGame& g, const Box& box, std::size_t n_seeds,
                                    const NewtonConfig& newton_cfg, std::uint64_t seed) {
  box.validate();
  if (box.dimension() != g.dimension()) throw std::invalid_argument("box dimension differs from game");
  CriticalSearch out;
  out.seeds = n_seeds;
  std::vector<Eigen::VectorXd> roots;
  for (auto x : sample_points({box, n_seeds, seed})) {
    bool ok = false;
    try {
      ok = newton(g, x, newton_cfg);
    } catch (const DomainError&) {
    } catch (const NumericFailure&) {
    }
    if (!ok) continue;
    ++out.converged;
    if (!inside(box, x)) continue;
    const bool dup = std::any_of(roots.begin(), roots.end(),
                                 [&](const Eigen::VectorXd& r) { return (r - x).norm() <= kMergeRadius; });
    if (!dup) roots.push_back(x);
  }
  // Stable order independent of seed order: lexicographic by coordinates.
  std::sort(roots.begin(), roots.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  for (const auto& r : roots) out.points.push_back(annotate(g, r));
  return out;
}

double ne_flatness_check(const DifferentialGame& g, const StrategyProfile& p) {
  if (static_cast<std::size_t>(p.size()) != g.dimension()) throw std::invalid_argument("profile has the wrong dimension");
  return g.jacobian_at(p).diagonal().cwiseAbs().maxCoeff();
}

}  // namespace ghg
