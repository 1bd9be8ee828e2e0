#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ghg/dynamics.hpp"
#include "ghg/game.hpp"
#include "ghg/hodge.hpp"

namespace ghg {

enum class Label { non_strategic, exact_scalar_potential, vector_potential, near_vector_potential, mixed };

const char* to_string(Label l);

struct ClassifyConfig {
  /// Empty box means [-2, 2]^n. The box is used both for sampling and for
  /// the windowed grid.
  SamplerConfig sampler{{}, 256, 0};
  /// 0 picks the largest power of two >= 8 with N^n <= 2^20, at most 64.
  std::size_t grid_resolution = 0;
  double symbolic_threshold = 1e-8;
  double grid_threshold = 1e-3;
  ZeroModePolicy zero_mode_policy = ZeroModePolicy::to_potential;
};

/// Grid resolution chosen for an n-dimensional game, or 0 when even N = 8
/// exceeds the point budget.
std::size_t default_grid_resolution(std::size_t n);

/// Shares of ||X||_1^2 of the windowed field. The constant mode is counted
/// only in `harmonic`, whichever side the decomposition placed it on.
struct EnergyFractions {
  double potential = 0;
  double vector = 0;
  double harmonic = 0;
};

struct ClassificationReport {
  std::string game;
  Label label = Label::mixed;
  bool hamiltonian = false;
  double sym_res = 0;  // max over samples of the Jacobian asymmetry
  double skew_res = 0;
  double analytic_div_max = 0;
  double nonstrategic_max = 0;  // max |Du|_inf
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> box_lower;
  std::vector<double> box_upper;
  std::size_t grid_resolution = 0;  // 0 when the grid analysis was skipped
  std::optional<FieldResiduals> grid;
  std::optional<EnergyFractions> fractions;
};

/// Label order: non-strategic, vector-potential, exact-scalar-potential,
/// near-vector-potential, mixed. `hamiltonian` is reported separately.
ClassificationReport classify(const DifferentialGame& g, const ClassifyConfig& cfg = {});

/// Utilities gamma * u_A + (1 - gamma) * u_B, simplified. Throws
/// StructureMismatch unless both games have the same players and blocks,
/// std::invalid_argument unless 0 <= gamma <= 1.
DifferentialGame interpolate_games(const DifferentialGame& a, const DifferentialGame& b, double gamma);

enum class FlowSummary { converged, recurrent, escaped, bounded };

const char* to_string(FlowSummary s);

struct SpectrumConfig {
  IntegratorConfig integrator;
  StrategyProfile initial;
  ClassifyConfig classify;
  double epsilon = 1e-2;
  double t_min = 1.0;
  double converged_tol = 1e-6;  // |Du(x_final)|_inf
};

struct SpectrumRecord {
  double gamma = 0;
  ClassificationReport report;
  FlowSummary summary = FlowSummary::bounded;
  double final_norm = 0;
};

/// Summary precedence: escaped, converged, recurrent, otherwise bounded.
std::vector<SpectrumRecord> spectrum_experiment(const DifferentialGame& a, const DifferentialGame& b,
                                                const std::vector<double>& gammas, const SpectrumConfig& cfg);

}  // namespace ghg
