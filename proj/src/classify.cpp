#include "ghg/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ghg/error.hpp"
#include "ghg/grid.hpp"

namespace ghg {

const char* to_string(Label l) {
  switch (l) {
    case Label::non_strategic: return "non-strategic";
    case Label::exact_scalar_potential: return "exact-scalar-potential";
    case Label::vector_potential: return "vector-potential";
    case Label::near_vector_potential: return "near-vector-potential";
    case Label::mixed: return "mixed";
  }
  return "mixed";
}

const char* to_string(FlowSummary s) {
  switch (s) {
    case FlowSummary::converged: return "converged";
    case FlowSummary::recurrent: return "recurrent";
    case FlowSummary::escaped: return "escaped";
    case FlowSummary::bounded: return "bounded";
  }
  return "bounded";
}

std::size_t default_grid_resolution(std::size_t n) {
  constexpr std::size_t budget = std::size_t{1} << 20;
  std::size_t best = 0;
  for (std::size_t N = 8; N <= 64; N *= 2) {
    std::size_t total = 1;
    bool fits = true;
    for (std::size_t a = 0; a < n && fits; ++a) {
      if (total > budget / N) fits = false;
      total *= N;
    }
    if (fits && total <= budget) best = N;
  }
  return best;
}

namespace {

EnergyFractions energy_fractions(const DecompositionResult& d, const GridField& X) {
  const double total = std::pow(norm1(X), 2);
  if (!(total > 0.0)) return {};
  GridField H(X.grid);
  for (std::size_t a = 0; a < H.dimension(); ++a)
    std::fill(H.components[a].values.begin(), H.components[a].values.end(), d.harmonic_mean[a]);
  GridField P = d.X_P, V = d.X_V;
  if (d.zero_mode_policy == ZeroModePolicy::to_potential)
    P -= H;
  else
    V -= H;
  return {std::pow(norm1(P), 2) / total, std::pow(norm1(V), 2) / total, std::pow(norm1(H), 2) / total};
}

}  // namespace

ClassificationReport classify(const DifferentialGame& g, const ClassifyConfig& cfg) {
  const std::size_t n = g.dimension();
  SamplerConfig sampler = cfg.sampler;
  if (sampler.box.dimension() == 0) sampler.box = Box::cube(n, -2.0, 2.0);
  if (sampler.box.dimension() != n) throw std::invalid_argument("classification box has the wrong dimension");
  sampler.box.validate();

  ClassificationReport r;
  r.game = g.name();
  r.samples = sampler.count;
  r.seed = sampler.seed;
  r.box_lower = sampler.box.lower;
  r.box_upper = sampler.box.upper;

  for (const auto& p : sample_points(sampler)) {
    const auto split = JacobianSplit::from(g.jacobian_at(p));
    r.sym_res = std::max(r.sym_res, split.sym_res);
    r.skew_res = std::max(r.skew_res, split.skew_res);
    r.analytic_div_max = std::max(r.analytic_div_max, std::abs(split.J.trace()));
    r.nonstrategic_max = std::max(r.nonstrategic_max, g.gradient_at(p).lpNorm<Eigen::Infinity>());
  }
  r.hamiltonian = r.skew_res <= cfg.symbolic_threshold;

  r.grid_resolution = cfg.grid_resolution ? cfg.grid_resolution : default_grid_resolution(n);
  if (r.grid_resolution != 0) {
    const BoxGrid grid(sampler.box.lower, sampler.box.upper, std::vector<std::size_t>(n, r.grid_resolution));
    const GridField X = sample_gradient(g, grid, Window::bump);
    r.grid = residuals(X);
    DecompositionConfig dc;
    dc.zero_mode_policy = cfg.zero_mode_policy;
    r.fractions = energy_fractions(decompose(X, dc), X);
  }

  if (r.nonstrategic_max <= tolerance::nonstrategic)
    r.label = Label::non_strategic;
  else if (r.analytic_div_max <= cfg.symbolic_threshold)
    r.label = Label::vector_potential;  // also wins when the Jacobian is symmetric, e.g. (2x, -2y)
  else if (r.sym_res <= cfg.symbolic_threshold)
    r.label = Label::exact_scalar_potential;
  else if (r.grid && r.grid->near_vp_residual <= cfg.grid_threshold && r.grid->div_residual > cfg.grid_threshold)
    r.label = Label::near_vector_potential;
  else
    r.label = Label::mixed;
  return r;
}

DifferentialGame interpolate_games(const DifferentialGame& a, const DifferentialGame& b, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (a.player_count() != b.player_count()) throw StructureMismatch("games have different player counts");
  std::vector<Player> players;
  for (std::size_t m = 0; m < a.player_count(); ++m) {
    const Player& pa = a.players()[m];
    const Player& pb = b.players()[m];
    if (pa.vars != pb.vars)
      throw StructureMismatch("player " + std::to_string(m) + " has different strategy blocks");
    Expr u = Expr::add(Expr::mul(Expr::constant(gamma), pa.utility),
                       Expr::mul(Expr::constant(1.0 - gamma), pb.utility));
    players.push_back({pa.name, pa.vars, simplify(u)});
  }
  return DifferentialGame(a.name() + "~" + b.name(), std::move(players));
}

std::vector<SpectrumRecord> spectrum_experiment(const DifferentialGame& a, const DifferentialGame& b,
                                                const std::vector<double>& gammas, const SpectrumConfig& cfg) {
  std::vector<SpectrumRecord> out;
  for (double gamma : gammas) {
    const DifferentialGame g = interpolate_games(a, b, gamma);
    SpectrumRecord rec;
    rec.gamma = gamma;
    rec.report = classify(g, cfg.classify);
    const Trajectory traj = integrate(g, cfg.initial, cfg.integrator);
    const StrategyProfile& xf = traj.states.back();
    rec.final_norm = xf.norm();
    if (traj.terminated_by == Termination::escape)
      rec.summary = FlowSummary::escaped;
    else if (g.gradient_at(xf).lpNorm<Eigen::Infinity>() <= cfg.converged_tol)
      rec.summary = FlowSummary::converged;
    else if (recurrence(traj, cfg.epsilon, cfg.t_min).verdict)
      rec.summary = FlowSummary::recurrent;
    else
      rec.summary = FlowSummary::bounded;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace ghg
