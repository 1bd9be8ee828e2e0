#pragma once

// Differential games: M players, player m owns a block of coordinates of
// the joint strategy and ascends its own utility u_m. The simultaneous
// gradient Du stacks each player's gradient of u_m over its own block.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ghg/expr.hpp"
#include "ghg/sampling.hpp"
#include "ghg/tolerance.hpp"

namespace ghg {

struct Player {
  std::string name;
  std::vector<std::string> vars;
  Expr utility;
};

/// Joint strategy in flat coordinate order.
using StrategyProfile = Eigen::VectorXd;

class DifferentialGame {
 public:
  /// Throws SchemaError on empty players/vars, duplicate variables or
  /// utilities that mention undeclared variables.
  DifferentialGame(std::string name, std::vector<Player> players);

  const std::string& name() const;
  std::span<const Player> players() const;
  std::size_t player_count() const;
  std::size_t dimension() const;
  std::span<const std::string> variables() const;
  /// Player owning flat coordinate k.
  std::size_t owner(std::size_t k) const;
  /// First flat coordinate of player m.
  std::size_t offset(std::size_t m) const;

  std::span<const Expr> gradient() const;
  /// d(Du)_i / dx_j, simplified.
  const Expr& jacobian_entry(std::size_t i, std::size_t j) const;
  /// Symbolic trace of the Jacobian.
  const Expr& divergence_expr() const;

  Eigen::VectorXd gradient_at(const StrategyProfile& p) const;
  Eigen::MatrixXd jacobian_at(const StrategyProfile& p) const;
  double utility_at(std::size_t m, const StrategyProfile& p) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

DifferentialGame load_game(std::string_view json_text);
DifferentialGame load_game_file(const std::filesystem::path& path);
std::string game_to_json(const DifferentialGame& g);

/// Du as expressions, coordinate k owned by player m giving du_m/dx_k.
std::vector<Expr> simultaneous_gradient(const DifferentialGame& g);

struct JacobianSplit {
  Eigen::MatrixXd J;
  Eigen::MatrixXd S;  // (J + J^T) / 2
  Eigen::MatrixXd A;  // (J - J^T) / 2
  double sym_res = 0.0;   // |A|_F / max(|J|_F, eps): zero for symmetric J
  double skew_res = 0.0;  // |S|_F / max(|J|_F, eps): zero for skew J

  static JacobianSplit from(const Eigen::MatrixXd& J);
};

JacobianSplit jacobian(const DifferentialGame& g, const StrategyProfile& p);

/// Sum of own-block diagonal second derivatives, i.e. trace of the Jacobian.
double divergence(const DifferentialGame& g, const StrategyProfile& p);

struct SampledVerdict {
  double max_value = 0.0;
  bool verdict = false;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

/// max |Du(p)|_inf over samples; true iff it stays below 1e-10.
SampledVerdict is_nonstrategic(const DifferentialGame& g, const SamplerConfig& sampler);

/// Game with utilities u_i - u'_i. Throws StructureMismatch unless both games
/// have the same players and variable blocks.
DifferentialGame difference_game(const DifferentialGame& a, const DifferentialGame& b);

/// Strategic equivalence via a non-strategic difference; max_value is
/// max |D(u - u')|_inf.
SampledVerdict strategically_equivalent(const DifferentialGame& a, const DifferentialGame& b,
                                        const SamplerConfig& sampler);

using PotentialFunction = std::function<double(std::span<const double>)>;

/// Monderer-Shapley check: for sampled (i, w'_i, w''_i, w_-i) the residual
/// |phi(w'_i, w_-i) - phi(w''_i, w_-i) - alpha_i (u_i(w'_i, w_-i) - u_i(w''_i, w_-i))|.
/// The sampler box is used for both the profile and the replacement block.
/// Verdict at 1e-8 absolute.
SampledVerdict verify_potential(const DifferentialGame& g, const PotentialFunction& phi,
                                std::span<const double> alpha, const SamplerConfig& sampler);
SampledVerdict verify_potential(const DifferentialGame& g, const Expr& phi,
                                std::span<const double> alpha, const SamplerConfig& sampler);

/// phi(w) = integral_0^1 Du(t w) . w dt, evaluated by adaptive quadrature.
class ExactPotential {
 public:
  explicit ExactPotential(DifferentialGame g, double abs_tol = 1e-10);
  double operator()(std::span<const double> w) const;

 private:
  DifferentialGame game_;
  double abs_tol_;
};

struct PotentialReconstruction {
  ExactPotential potential;
  double max_sym_res = 0.0;
  double max_gradient_residual = 0.0;  // max |grad phi - Du|_inf, central differences
  std::size_t samples = 0;
};

/// Throws PreconditionFailed when the Jacobian is not symmetric to 1e-8 on
/// the sample set, NumericFailure when quadrature does not converge.
PotentialReconstruction reconstruct_exact_potential(const DifferentialGame& g,
                                                    const SamplerConfig& sampler);

}  // namespace ghg
