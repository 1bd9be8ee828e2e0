#include "ghg/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ghg/error.hpp"
#include "quadrature.hpp"

namespace ghg {

using json = nlohmann::json;

struct DifferentialGame::Impl {
  std::string name;
  std::vector<Player> players;
  std::vector<std::string> variables;
  std::vector<std::size_t> owner;
  std::vector<std::size_t> offsets;

  std::vector<Expr> gradient;
  std::vector<Expr> jacobian;  // row-major n x n
  Expr divergence;

  std::vector<BoundExpr> bound_gradient;
  std::vector<BoundExpr> bound_jacobian;
  std::vector<BoundExpr> bound_utility;
};

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  });
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_profile(const DifferentialGame& g, const StrategyProfile& p) {
  if (static_cast<std::size_t>(p.size()) != g.dimension())
    throw std::invalid_argument("strategy profile has length " + std::to_string(p.size()) +
                                ", game dimension is " + std::to_string(g.dimension()));
}

}  // namespace

DifferentialGame::DifferentialGame(std::string name, std::vector<Player> players) {
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  if (players.empty()) throw SchemaError("game needs at least one player");

  std::set<std::string, std::less<>> declared;
  for (std::size_t m = 0; m < players.size(); ++m) {
    const auto& pl = players[m];
    if (pl.vars.empty()) throw SchemaError("player '" + pl.name + "' owns no variables");
    impl->offsets.push_back(impl->variables.size());
    for (const auto& v : pl.vars) {
      if (!valid_identifier(v)) throw SchemaError("invalid variable name '" + v + "'");
      if (!declared.insert(v).second) throw SchemaError("duplicate variable '" + v + "'");
      impl->variables.push_back(v);
      impl->owner.push_back(m);
    }
  }
  for (const auto& pl : players) {
    for (const auto& v : variables_of(pl.utility))
      if (!declared.contains(v))
        throw SchemaError("utility of player '" + pl.name + "' uses undeclared variable '" + v + "'");
  }
  impl->players = std::move(players);

  const std::size_t n = impl->variables.size();
  for (std::size_t k = 0; k < n; ++k)
    impl->gradient.push_back(
        differentiate(impl->players[impl->owner[k]].utility, impl->variables[k]));
  impl->jacobian.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      impl->jacobian.push_back(differentiate(impl->gradient[i], impl->variables[j]));
  Expr trace = Expr::constant(0.0);
  for (std::size_t k = 0; k < n; ++k) trace = Expr::add(trace, impl->jacobian[k * n + k]);
  impl->divergence = simplify(trace);

  for (const auto& e : impl->gradient) impl->bound_gradient.emplace_back(e, impl->variables);
  for (const auto& e : impl->jacobian) impl->bound_jacobian.emplace_back(e, impl->variables);
  for (const auto& pl : impl->players) impl->bound_utility.emplace_back(pl.utility, impl->variables);
  impl_ = std::move(impl);
}

const std::string& DifferentialGame::name() const { return impl_->name; }
std::span<const Player> DifferentialGame::players() const { return impl_->players; }
std::size_t DifferentialGame::player_count() const { return impl_->players.size(); }
std::size_t DifferentialGame::dimension() const { return impl_->variables.size(); }
std::span<const std::string> DifferentialGame::variables() const { return impl_->variables; }
std::size_t DifferentialGame::owner(std::size_t k) const { return impl_->owner.at(k); }
std::size_t DifferentialGame::offset(std::size_t m) const { return impl_->offsets.at(m); }
std::span<const Expr> DifferentialGame::gradient() const { return impl_->gradient; }
const Expr& DifferentialGame::jacobian_entry(std::size_t i, std::size_t j) const {
  return impl_->jacobian.at(i * dimension() + j);
}
const Expr& DifferentialGame::divergence_expr() const { return impl_->divergence; }

Eigen::VectorXd DifferentialGame::gradient_at(const StrategyProfile& p) const {
  check_profile(*this, p);
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k)
    out[k] = impl_->bound_gradient[static_cast<std::size_t>(k)](as_span(p));
  return out;
}

Eigen::MatrixXd DifferentialGame::jacobian_at(const StrategyProfile& p) const {
  check_profile(*this, p);
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      J(i, j) = impl_->bound_jacobian[static_cast<std::size_t>(i * n + j)](as_span(p));
  return J;
}

double DifferentialGame::utility_at(std::size_t m, const StrategyProfile& p) const {
  check_profile(*this, p);
  return impl_->bound_utility.at(m)(as_span(p));
}

// ---------------------------------------------------------------------------
// Game documents

DifferentialGame load_game(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("game document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("game document must be a JSON object");
  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw SchemaError("'name' must be a string");
    name = doc["name"].get<std::string>();
  }
  if (!doc.contains("players") || !doc["players"].is_array())
    throw SchemaError("'players' must be an array");

  struct Raw {
    std::string name;
    std::vector<std::string> vars;
    std::string utility;
  };
  std::vector<Raw> raw;
  std::set<std::string, std::less<>> all_vars;
  for (const auto& p : doc["players"]) {
    if (!p.is_object()) throw SchemaError("each player must be an object");
    if (!p.contains("name") || !p["name"].is_string()) throw SchemaError("player 'name' must be a string");
    if (!p.contains("vars") || !p["vars"].is_array()) throw SchemaError("player 'vars' must be an array");
    if (!p.contains("utility") || !p["utility"].is_string())
      throw SchemaError("player 'utility' must be a string");
    Raw r{p["name"].get<std::string>(), {}, p["utility"].get<std::string>()};
    for (const auto& v : p["vars"]) {
      if (!v.is_string()) throw SchemaError("variable names must be strings");
      r.vars.push_back(v.get<std::string>());
      if (!all_vars.insert(r.vars.back()).second)
        throw SchemaError("duplicate variable '" + r.vars.back() + "'");
    }
    raw.push_back(std::move(r));
  }

  std::vector<Player> players;
  for (auto& r : raw) {
    Expr u;
    try {
      u = parse(r.utility, all_vars);
    } catch (const ParseError& e) {
      throw ParseError("player '" + r.name + "' utility: " + e.detail(), e.offset());
    }
    players.push_back({std::move(r.name), std::move(r.vars), std::move(u)});
  }
  return DifferentialGame(std::move(name), std::move(players));
}

DifferentialGame load_game_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read game file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_game(ss.str());
}

std::string game_to_json(const DifferentialGame& g) {
  json doc;
  doc["name"] = g.name();
  doc["players"] = json::array();
  for (const auto& p : g.players())
    doc["players"].push_back({{"name", p.name}, {"vars", p.vars}, {"utility", render(p.utility)}});
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Gradient, Jacobian, divergence

std::vector<Expr> simultaneous_gradient(const DifferentialGame& g) {
  return {g.gradient().begin(), g.gradient().end()};
}

JacobianSplit JacobianSplit::from(const Eigen::MatrixXd& J) {
  JacobianSplit s;
  s.J = J;
  s.S = 0.5 * (J + J.transpose());
  s.A = 0.5 * (J - J.transpose());
  const double scale = std::max(J.norm(), tolerance::norm_floor);
  s.sym_res = s.A.norm() / scale;
  s.skew_res = s.S.norm() / scale;
  return s;
}

JacobianSplit jacobian(const DifferentialGame& g, const StrategyProfile& p) {
  return JacobianSplit::from(g.jacobian_at(p));
}

double divergence(const DifferentialGame& g, const StrategyProfile& p) {
  return g.jacobian_at(p).trace();
}

SampledVerdict is_nonstrategic(const DifferentialGame& g, const SamplerConfig& sampler) {
  SampledVerdict r;
  r.seed = sampler.seed;
  for (const auto& p : sample_points(sampler)) {
    r.max_value = std::max(r.max_value, g.gradient_at(p).lpNorm<Eigen::Infinity>());
    ++r.samples;
  }
  r.verdict = r.max_value <= tolerance::nonstrategic;
  return r;
}

DifferentialGame difference_game(const DifferentialGame& a, const DifferentialGame& b) {
  if (a.player_count() != b.player_count())
    throw StructureMismatch("games have different numbers of players");
  std::vector<Player> players;
  for (std::size_t m = 0; m < a.player_count(); ++m) {
    const auto& pa = a.players()[m];
    const auto& pb = b.players()[m];
    if (pa.vars != pb.vars)
      throw StructureMismatch("player " + std::to_string(m) + " owns different variables");
    players.push_back({pa.name, pa.vars, simplify(Expr::sub(pa.utility, pb.utility))});
  }
  return DifferentialGame(a.name() + " - " + b.name(), std::move(players));
}

SampledVerdict strategically_equivalent(const DifferentialGame& a, const DifferentialGame& b,
                                        const SamplerConfig& sampler) {
  return is_nonstrategic(difference_game(a, b), sampler);
}

SampledVerdict verify_potential(const DifferentialGame& g, const PotentialFunction& phi,
                                std::span<const double> alpha, const SamplerConfig& sampler) {
  if (alpha.size() != g.player_count())
    throw std::invalid_argument("need one weight per player");
  for (double a : alpha)
    if (!(a > 0.0)) throw std::invalid_argument("potential weights must be positive");

  const std::size_t n = g.dimension();
  SamplerConfig pairs = sampler;
  pairs.box.lower.insert(pairs.box.lower.end(), sampler.box.lower.begin(), sampler.box.lower.end());
  pairs.box.upper.insert(pairs.box.upper.end(), sampler.box.upper.begin(), sampler.box.upper.end());

  SampledVerdict r;
  r.seed = sampler.seed;
  for (const auto& z : sample_points(pairs)) {
    const Eigen::VectorXd first = z.head(static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < g.player_count(); ++m) {
      Eigen::VectorXd second = first;
      const auto off = static_cast<Eigen::Index>(g.offset(m));
      const auto len = static_cast<Eigen::Index>(g.players()[m].vars.size());
      second.segment(off, len) = z.segment(static_cast<Eigen::Index>(n) + off, len);
      const double dphi = phi(as_span(first)) - phi(as_span(second));
      const double du = g.utility_at(m, first) - g.utility_at(m, second);
      r.max_value = std::max(r.max_value, std::abs(dphi - alpha[m] * du));
      ++r.samples;
    }
  }
  r.verdict = r.max_value <= tolerance::potential;
  return r;
}

SampledVerdict verify_potential(const DifferentialGame& g, const Expr& phi,
                                std::span<const double> alpha, const SamplerConfig& sampler) {
  BoundExpr bound(phi, g.variables());
  return verify_potential(g, [&bound](std::span<const double> x) { return bound(x); }, alpha,
                          sampler);
}

// ---------------------------------------------------------------------------
// Potential reconstruction by the radial line integral

ExactPotential::ExactPotential(DifferentialGame g, double abs_tol)
    : game_(std::move(g)), abs_tol_(abs_tol) {}

double ExactPotential::operator()(std::span<const double> w) const {
  const auto n = static_cast<Eigen::Index>(game_.dimension());
  if (static_cast<Eigen::Index>(w.size()) != n)
    throw std::invalid_argument("potential evaluated at a point of wrong dimension");
  const Eigen::Map<const Eigen::VectorXd> omega(w.data(), n);
  auto integrand = [&](double t) -> double {
    const Eigen::VectorXd x = t * omega;
    return game_.gradient_at(x).dot(omega);
  };
  detail::GaussKronrod15<decltype(integrand)> quad(integrand, abs_tol_);
  return quad.integrate(0.0, 1.0);
}

PotentialReconstruction reconstruct_exact_potential(const DifferentialGame& g,
                                                    const SamplerConfig& sampler) {
  const auto points = sample_points(sampler);
  double max_sym = 0.0;
  for (const auto& p : points) max_sym = std::max(max_sym, jacobian(g, p).sym_res);
  if (max_sym > tolerance::closed) {
    std::ostringstream msg;
    msg << "simultaneous gradient is not closed: max sym_res " << max_sym;
    throw PreconditionFailed(msg.str());
  }

  PotentialReconstruction out{ExactPotential(g), max_sym, 0.0, 0};
  const double h = 1e-5;
  for (const auto& p : points) {
    const Eigen::VectorXd du = g.gradient_at(p);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      Eigen::VectorXd plus = p, minus = p;
      plus[k] += h;
      minus[k] -= h;
      const double fd = (out.potential(as_span(plus)) - out.potential(as_span(minus))) / (2 * h);
      out.max_gradient_residual = std::max(out.max_gradient_residual, std::abs(fd - du[k]));
    }
    ++out.samples;
  }
  return out;
}

}  // namespace ghg
