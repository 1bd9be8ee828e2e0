#include <doctest.h>

#include <cmath>
#include <random>

#include "ghg/classify.hpp"
#include "ghg/error.hpp"
#include "ghg/report_json.hpp"

using namespace ghg;

namespace {

DifferentialGame game(const char* name) { return load_game_file(std::string(GHG_DATA_DIR) + "/" + name + ".json"); }

ClassifyConfig fast() {
  ClassifyConfig c;
  c.sampler.count = 64;
  c.grid_resolution = 16;
  return c;
}

}  // namespace

TEST_CASE("default grid resolution") {
  CHECK(default_grid_resolution(1) == 64);
  CHECK(default_grid_resolution(2) == 64);
  CHECK(default_grid_resolution(3) == 64);
  CHECK(default_grid_resolution(4) == 32);
  CHECK(default_grid_resolution(5) == 16);
  CHECK(default_grid_resolution(6) == 8);
  CHECK(default_grid_resolution(7) == 0);
}

TEST_CASE("taxonomy labels") {
  const auto orbit = classify(game("orbit"));
  CHECK(orbit.label == Label::vector_potential);
  CHECK_FALSE(orbit.hamiltonian);
  CHECK(orbit.analytic_div_max == 0.0);

  const auto vp = classify(game("vpexample"));
  CHECK(vp.label == Label::vector_potential);
  CHECK_FALSE(vp.hamiltonian);

  const auto rot = classify(game("rotation"));
  CHECK(rot.label == Label::vector_potential);
  CHECK(rot.hamiltonian);

  const auto pot = classify(game("potential"), fast());
  CHECK(pot.label == Label::exact_scalar_potential);
  CHECK(pot.sym_res <= 1e-10);

  const auto zero = classify(load_game(R"({"name":"z","players":[{"name":"a","vars":["x"],"utility":"y^2"},)"
                                       R"({"name":"b","vars":["y"],"utility":"0"}]})"));
  CHECK(zero.label == Label::non_strategic);

  const auto ivp = classify(game("interp_vp"), fast());
  CHECK(ivp.label == Label::mixed);
  CHECK(ivp.analytic_div_max > 0.0);
}

TEST_CASE("windowed gradient field keeps its scalar label") {
  // Du = (sin x, 0) on one period: div = cos x, and div + lap div = 0 before
  // windowing. The symmetric Jacobian decides the label first.
  const auto g = load_game(R"j({"name":"s","players":[{"name":"a","vars":["x"],"utility":"-cos(x)"},)j"
                           R"({"name":"b","vars":["y"],"utility":"0*y"}]})");
  ClassifyConfig c;
  c.sampler.box = {{-3.141592653589793, -3.141592653589793}, {3.141592653589793, 3.141592653589793}};
  const auto r = classify(g, c);
  REQUIRE(r.grid);
  CHECK(r.label == Label::exact_scalar_potential);
  CHECK(r.grid->div_residual > 1e-3);
}

TEST_CASE("energy fractions sum to one") {
  for (const char* name : {"orbit", "vpexample", "rotation", "drift"}) {
    for (auto policy : {ZeroModePolicy::to_potential, ZeroModePolicy::to_vector}) {
      ClassifyConfig c;
      c.zero_mode_policy = policy;
      const auto r = classify(game(name), c);
      REQUIRE(r.fractions);
      INFO(name);
      CHECK(r.fractions->potential + r.fractions->vector + r.fractions->harmonic == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  const auto isp = classify(game("interp_sp"), fast());
  REQUIRE(isp.fractions);
  CHECK(isp.fractions->potential + isp.fractions->vector + isp.fractions->harmonic == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("skew games are divergence free") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    const std::string a = std::to_string(u(rng)), b = std::to_string(u(rng));
    const auto g = load_game(R"({"name":"k","players":[{"name":"p","vars":["x"],"utility":")" + a + "*x*y + " + b +
                             R"(*y^2"},{"name":"q","vars":["y"],"utility":"-)" + a + "*x*y + " + b + R"(*x^3"}]})");
    const auto r = classify(g, fast());
    CHECK(r.skew_res <= 1e-10);
    CHECK(r.analytic_div_max <= 1e-8);
    CHECK(r.hamiltonian);
    CHECK(r.label == Label::vector_potential);
  }
}

TEST_CASE("interpolation") {
  const auto sp = game("interp_sp"), vp = game("interp_vp");
  const auto one = interpolate_games(sp, vp, 1.0);
  const auto zero = interpolate_games(sp, vp, 0.0);
  const auto half = interpolate_games(sp, vp, 0.5);
  for (std::size_t m = 0; m < 2; ++m) {
    CHECK(one.players()[m].utility == simplify(sp.players()[m].utility));
    CHECK(zero.players()[m].utility == simplify(vp.players()[m].utility));
  }
  for (const auto& p : sample_points(SamplerConfig::standard(4))) {
    const Eigen::VectorXd avg = 0.5 * (sp.gradient_at(p) + vp.gradient_at(p));
    CHECK((half.gradient_at(p) - avg).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  for (double gamma : {0.1, 0.37, 0.9}) {
    const auto g = interpolate_games(sp, vp, gamma);
    for (const auto& p : sample_points({Box::cube(4, -2, 2), 32, 1})) {
      const Eigen::VectorXd lin = gamma * sp.gradient_at(p) + (1 - gamma) * vp.gradient_at(p);
      CHECK((g.gradient_at(p) - lin).lpNorm<Eigen::Infinity>() <= 1e-12 * (1 + lin.norm()));
    }
  }
  CHECK_THROWS_AS(interpolate_games(sp, game("orbit"), 0.5), StructureMismatch);
  CHECK_THROWS_AS(interpolate_games(sp, vp, 1.5), std::invalid_argument);
}

TEST_CASE("spectrum experiment") {
  SpectrumConfig cfg;
  cfg.initial = Eigen::Vector4d(1, -0.5, 0.5, 1);
  cfg.integrator.step = 1e-2;
  cfg.integrator.t_end = 50;
  cfg.classify = fast();
  std::vector<double> gammas;
  for (int i = 0; i <= 10; ++i) gammas.push_back(i / 10.0);
  const auto recs = spectrum_experiment(game("interp_sp"), game("interp_vp"), gammas, cfg);
  REQUIRE(recs.size() == 11);
  CHECK(recs.back().summary == FlowSummary::converged);
  CHECK(recs.back().report.label == Label::exact_scalar_potential);
  CHECK(recs.front().report.label == Label::mixed);
  CHECK(recs.front().report.analytic_div_max > 0.0);
  for (std::size_t k = 1; k < recs.size(); ++k) {
    REQUIRE(recs[k].report.fractions);
    CHECK(recs[k].report.fractions->potential >= recs[k - 1].report.fractions->potential - 1e-9);
  }
  const nlohmann::json j = recs.back();
  CHECK(j["summary"] == "converged");
  CHECK(j["classification"]["label"] == "exact-scalar-potential");
}

TEST_CASE("report json field names") {
  const nlohmann::json j = classify(game("orbit"), fast());
  for (const char* k : {"label", "hamiltonian", "sym_res", "skew_res", "analytic_div_max", "grid_residuals",
                        "energy_fractions", "seed", "samples"})
    CHECK(j.contains(k));
  CHECK(j["label"] == "vector-potential");
  CHECK(j["grid_residuals"].contains("near_vp_residual"));
  const nlohmann::json d = DecompositionDiagnostics{};
  for (const char* k : {"reconstruction_error", "curl_residual_P", "div_residual_V", "orthogonality_L2",
                        "orthogonality_H1", "near_vp_residual"})
    CHECK(d.contains(k));
}
