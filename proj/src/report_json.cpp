#include "ghg/report_json.hpp"

#include <cmath>

namespace ghg {

namespace {

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// JSON has no infinity; unbounded distances are written as null.
nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

void to_json(nlohmann::json& j, const FieldResiduals& r) {
  j = {{"curl_residual", r.curl_residual}, {"div_residual", r.div_residual}, {"near_vp_residual", r.near_vp_residual}};
}

void to_json(nlohmann::json& j, const DecompositionDiagnostics& d) {
  j = {{"reconstruction_error", d.reconstruction_error}, {"curl_residual_P", d.curl_residual_P},
       {"div_residual_V", d.div_residual_V},             {"orthogonality_L2", d.orthogonality_L2},
       {"orthogonality_H1", d.orthogonality_H1},         {"near_vp_residual", d.near_vp_residual}};
}

void to_json(nlohmann::json& j, const EnergyFractions& f) {
  j = {{"rho_P", f.potential}, {"rho_V", f.vector}, {"rho_harmonic", f.harmonic}};
}

void to_json(nlohmann::json& j, const ClassificationReport& r) {
  j = {{"game", r.game},
       {"label", to_string(r.label)},
       {"hamiltonian", r.hamiltonian},
       {"sym_res", r.sym_res},
       {"skew_res", r.skew_res},
       {"analytic_div_max", r.analytic_div_max},
       {"nonstrategic_max", r.nonstrategic_max},
       {"samples", r.samples},
       {"seed", r.seed},
       {"box", {{"lower", r.box_lower}, {"upper", r.box_upper}}},
       {"grid_resolution", r.grid_resolution}};
  j["grid_residuals"] = r.grid ? nlohmann::json(*r.grid) : nlohmann::json();
  j["energy_fractions"] = r.fractions ? nlohmann::json(*r.fractions) : nlohmann::json();
}

void to_json(nlohmann::json& j, const RecurrenceReport& r) {
  j = {{"epsilon", r.epsilon},
       {"t_min", r.t_min},
       {"return_times", r.return_times},
       {"min_distance_after_t_min", finite_or_null(r.min_distance_after_t_min)},
       {"verdict", r.verdict}};
}

void to_json(nlohmann::json& j, const CriticalPoint& p) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : p.block_hessian) blocks.push_back({{"min", b.min}, {"max", b.max}});
  j = {{"location", as_vector(p.location)},
       {"gradient_norm", p.gradient_norm},
       {"block_hessian_eigenvalues", blocks},
       {"local_ne_candidate", p.local_ne_candidate},
       {"flatness", p.flatness}};
}

void to_json(nlohmann::json& j, const CriticalSearch& s) {
  j = {{"seeds", s.seeds}, {"converged", s.converged}, {"points", s.points}};
}

void to_json(nlohmann::json& j, const SpectrumRecord& r) {
  j = {{"gamma", r.gamma}, {"classification", r.report}, {"summary", to_string(r.summary)}, {"final_norm", r.final_norm}};
}

}  // namespace ghg
