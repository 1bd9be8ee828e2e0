// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ghg/classify.hpp"
#include "ghg/dynamics.hpp"
#include "ghg/game.hpp"
#include "ghg/grid.hpp"
#include "ghg/hodge.hpp"
#include "oracles.hpp"

using namespace ghg;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

DifferentialGame game(const std::string& name) { return load_game_file(std::string(GHG_DATA_DIR) + "/" + name + ".json"); }

IntegratorConfig rk4(double h, double t_end) {
  IntegratorConfig c;
  c.step = h;
  c.t_end = t_end;
  return c;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) r[i++] = x;
  return r;
}

Outcome closedness() {
  Outcome o;
  std::mt19937_64 rng(101);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const auto g = t % 2 ? BoxGrid::cube(3, -pi, pi, 32) : BoxGrid::cube(2, -1, 2, 64);
    const auto f = oracle::random_band_limited(g, rng);
    worst = std::max(worst, norm2(d2_grid(d1_grid(f))) / norm0(f));
  }
  o.require(worst <= 1e-10, "|d2 d1 f|_2 / |f|_0 = " + num(worst));
  o.detail = o.detail.empty() ? "max ratio " + num(worst) : o.detail;
  return o;
}

Outcome boundedness() {
  Outcome o;
  std::mt19937_64 rng(102);
  double worst = -1e300;
  for (int t = 0; t < 100; ++t) {
    const auto g = t % 2 ? BoxGrid::cube(3, -1, 1, 8) : BoxGrid({0, 0}, {1, 3}, {32, 16});
    const auto X = oracle::random_field(g, rng);
    const auto d2 = d2_grid(X);
    worst = std::max(worst, inner2(d2, d2) - 4 * inner1(X, X));
  }
  o.require(worst <= 1e-9, "max(|d2X|^2 - 4|X|_1^2) = " + num(worst));
  if (o.pass) o.detail = "max(|d2X|^2 - 4|X|_1^2) = " + num(worst);
  return o;
}

Outcome decomposition() {
  Outcome o;
  const auto T = BoxGrid::cube(2, -pi, pi, 32);
  auto S = [&](auto f) { return sample([f](std::span<const double> x) { return f(x[0], x[1]); }, T); };
  const GridField G = d1_grid(S([](double x, double y) { return std::sin(x) * std::sin(y); }));
  const GridField R(T, {S([](double, double y) { return -std::sin(y); }), S([](double x, double) { return std::sin(x); })});
  const GridField X = G + R;
  const auto p = decompose(X, {ZeroModePolicy::to_potential});
  const auto v = decompose(X, {ZeroModePolicy::to_vector});
  for (const auto* d : {&p, &v}) {
    const double eP = norm1(d->X_P - G) / norm1(G), eV = norm1(d->X_V - R) / norm1(R);
    o.require(eP <= 1e-10 && eV <= 1e-10, "recovery " + num(eP) + ", " + num(eV));
    const auto& dg = d->diagnostics;
    o.require(dg.orthogonality_L2 <= 1e-10, "L2 orthogonality " + num(dg.orthogonality_L2));
    o.require(dg.orthogonality_H1 <= 1e-10, "H1 orthogonality " + num(dg.orthogonality_H1));
    o.require(dg.reconstruction_error <= 1e-12, "reconstruction " + num(dg.reconstruction_error));
  }

  std::mt19937_64 rng(103);
  const auto g = BoxGrid({0, -1}, {2, 1}, {16, 8});
  const auto W = oracle::random_field(g, rng);
  const auto a = decompose(W, {ZeroModePolicy::to_potential});
  const auto b = decompose(W, {ZeroModePolicy::to_vector});
  bool same = a.phi.values == b.phi.values && a.harmonic_mean == b.harmonic_mean;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double m = a.harmonic_mean[c];
      same = same && a.X_P.components[c].values[i] == b.X_P.components[c].values[i] + m &&
             b.X_V.components[c].values[i] == a.X_V.components[c].values[i] + m;
    }
  o.require(same, "zero-mode policies differ beyond the constant mode");
  if (o.pass) o.detail = "recovery, orthogonality and reconstruction within bounds; policies differ by the mean only";
  return o;
}

Expr orbit_invariant() { return parse("y^2/2 + x^2/2 + x^4/4", {"x", "y"}); }

Outcome orbit() {
  Outcome o;
  const auto g = game("orbit");
  const auto m = monodromy_log_det(g, vec({1, 0}), rk4(1e-3, 50));
  const auto& traj = m.trajectory;
  o.require(traj.terminated_by == Termination::t_end, "terminated early");
  const double drift = conserved_drift(traj, orbit_invariant());
  o.require(drift <= 1e-6, "conserved drift " + num(drift));
  const auto rec = recurrence(traj, 1e-2, 1.0);
  o.require(rec.verdict && rec.return_times.size() >= 3, "returns " + std::to_string(rec.return_times.size()));
  double ld = 0;
  for (double l : m.log_det) ld = std::max(ld, std::abs(l));
  o.require(ld <= 1e-6, "|ln det M| " + num(ld));
  if (o.pass)
    o.detail = "drift " + num(drift) + ", " + std::to_string(rec.return_times.size()) + " returns, |ln det M| " + num(ld);
  return o;
}

Outcome divergent() {
  Outcome o;
  const auto traj = integrate(game("drift"), vec({1, 0}), rk4(1e-3, 10));
  o.require(traj.terminated_by == Termination::escape && traj.times.back() < 10, "no escape before t = 10");
  o.require(traj.states.back().norm() > 1e3, "final norm " + num(traj.states.back().norm()));
  double w = 0;
  for (double l : traj.log_volume) w = std::max(w, std::abs(l));
  o.require(w <= 1e-8, "|w| " + num(w));
  if (o.pass) o.detail = "escape at t = " + num(traj.times.back()) + ", |w| " + num(w);
  return o;
}

Outcome potential() {
  Outcome o;
  const auto g = game("potential");
  const SamplerConfig sc{Box::cube(4, -2, 2), 64, 0};
  double sym = 0;
  for (const auto& p : sample_points(sc)) sym = std::max(sym, jacobian(g, p).sym_res);
  o.require(sym <= 1e-10, "sym_res " + num(sym));

  const auto m = monodromy_log_det(g, vec({1, 1, -1, 0.5}), rk4(1e-3, 50));
  const double fin = m.trajectory.states.back().norm();
  o.require(fin <= 1e-4, "|x(50)| = " + num(fin) + " > 1e-4");
  bool decreasing = true;
  for (std::size_t k = 1; k < m.log_det.size(); ++k) decreasing = decreasing && m.log_det[k] < m.log_det[k - 1];
  o.require(decreasing, "ln det M not strictly decreasing");

  const auto rec = reconstruct_exact_potential(g, {Box::cube(4, -1, 1), 256, 0});
  o.require(rec.max_gradient_residual <= 1e-6, "potential gradient residual " + num(rec.max_gradient_residual));
  if (o.pass) o.detail = "|x(50)| " + num(fin);
  return o;
}

std::string two_player(const std::string& a, const std::vector<std::string>& va, const std::string& b,
                       const std::vector<std::string>& vb) {
  auto list = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "\"" : ",\"") + x + "\"";
    return s;
  };
  return R"({"name":"t","players":[{"name":"a","vars":[)" + list(va) + R"(],"utility":")" + a +
         R"("},{"name":"b","vars":[)" + list(vb) + R"(],"utility":")" + b + R"("}]})";
}

Outcome hamiltonian() {
  Outcome o;
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    std::ostringstream bxy;
    bxy.precision(17);
    bxy << u(rng) << "*x1*y1 + " << u(rng) << "*x1*y2 + " << u(rng) << "*x2*y1 + " << u(rng) << "*x2*y2";
    const auto g = load_game(two_player(bxy.str(), {"x1", "x2"}, "-(" + bxy.str() + ")", {"y1", "y2"}));
    for (const auto& p : sample_points(SamplerConfig::standard(4))) worst = std::max(worst, std::abs(divergence(g, p)));
  }
  o.require(worst <= 1e-12, "max |div| " + num(worst));
  const auto r = classify(game("vpexample"));
  o.require(r.label == Label::vector_potential, std::string("(x^2, -y^2) labelled ") + to_string(r.label));
  o.require(!r.hamiltonian, "(x^2, -y^2) flagged hamiltonian");
  if (o.pass) o.detail = "max |div| " + num(worst) + ", (x^2, -y^2) vector-potential, not hamiltonian";
  return o;
}

Outcome flatness() {
  Outcome o;
  std::size_t candidates = 0;
  double worst = 0;
  auto scan = [&](const DifferentialGame& g) {
    const auto s = find_critical_points(g, Box::cube(g.dimension(), -2, 2), 32);
    for (const auto& p : s.points)
      if (p.local_ne_candidate) {
        ++candidates;
        worst = std::max(worst, p.flatness);
      }
  };
  scan(game("orbit"));
  // Du = (2c x + p(y), -2c y + r(x)) has zero divergence for every c.
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    const double c = t % 2 ? u(rng) : 0.0;
    std::ostringstream a, b;
    a.precision(17);
    b.precision(17);
    a << c << "*x^2 + x*(" << u(rng) << " + " << u(rng) << "*y + " << u(rng) << "*y^3)";
    b << -c << "*y^2 + y*(" << u(rng) << " + " << u(rng) << "*x + " << u(rng) << "*x^3)";
    const auto g = load_game(two_player(a.str(), {"x"}, b.str(), {"y"}));
    double div = 0;
    for (const auto& p : sample_points(SamplerConfig::standard(2))) div = std::max(div, std::abs(divergence(g, p)));
    o.require(div <= 1e-12, "construction " + std::to_string(t) + " has divergence " + num(div));
    scan(g);
  }
  o.require(candidates > 0, "no local NE candidates found");
  o.require(worst <= 1e-8, "flatness " + num(worst));
  if (o.pass) o.detail = std::to_string(candidates) + " candidates, max flatness " + num(worst);
  return o;
}

Outcome near_vp() {
  Outcome o;
  const auto T = BoxGrid::cube(2, -pi, pi, 32);
  const GridField X(T, {sample([](std::span<const double> x) { return std::sin(x[0]); }, T), GridScalar(T)});
  const auto r = residuals(X);
  o.require(r.div_residual > 0.1, "div_residual " + num(r.div_residual));
  o.require(r.near_vp_residual <= 1e-10, "near_vp_residual " + num(r.near_vp_residual));
  if (o.pass) o.detail = "div_residual " + num(r.div_residual) + ", near_vp_residual " + num(r.near_vp_residual);
  return o;
}

Outcome liouville() {
  Outcome o;
  double worst = 0;
  for (const char* name : {"orbit", "drift", "potential", "vpexample", "rotation", "interp_sp", "interp_vp"}) {
    const auto g = game(name);
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g.dimension()), 0.5);
    x0[0] = 1.0;
    const auto m = monodromy_log_det(g, x0, rk4(1e-3, 50));
    for (std::size_t k = 0; k < m.log_det.size(); ++k) {
      const double w = m.trajectory.log_volume[k];
      worst = std::max(worst, std::abs(m.log_det[k] - w) / (1 + std::abs(w)));
    }
  }
  o.require(worst <= 1e-5, "max |ln det M - w| / (1 + |w|) = " + num(worst));
  if (o.pass) o.detail = "max |ln det M - w| / (1 + |w|) = " + num(worst);
  return o;
}

Outcome expressions() {
  Outcome o;
  const std::set<std::string, std::less<>> xyz{"x", "y", "z"};
  oracle::ExprGen gen(111);
  std::size_t round_trip_fail = 0, deriv_fail = 0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = gen(6);
    if (!(parse(render(e), xyz) == e)) ++round_trip_fail;
    const Env p = gen.point();
    for (const char* v : {"x", "y", "z"}) {
      const double exact = evaluate(differentiate(e, v), p);
      const double fd = oracle::central_diff(e, v, p, 1e-5);
      if (!(std::abs(exact - fd) <= 1e-6 * (1.0 + std::abs(exact)))) ++deriv_fail;
    }
  }
  o.require(round_trip_fail == 0, std::to_string(round_trip_fail) + " round-trip failures");
  o.require(deriv_fail == 0, std::to_string(deriv_fail) + " derivative mismatches");
  if (o.pass) o.detail = "1000 round trips, 3000 derivatives";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "ghg_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = GHG_CLI, data = GHG_DATA_DIR;
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"simulate " + data + "/orbit.json --init 1,0 --t-end 10 --conserved \"y^2/2 + x^2/2 + x^4/4\" --out " +
           (dir / "traj.csv").string() + " --json",
       {"traj.csv"}},
      {"classify " + data + "/orbit.json --json --grid 32", {}},
      {"decompose " + data + "/vpexample.json --grid 32 --out " + (dir / "dec").string(),
       {"dec/diagnostics.json", "dec/phi.ghg", "dec/x_p.ghg", "dec/x_v.ghg"}},
      {"interpolate " + data + "/interp_sp.json " + data + "/interp_vp.json --gammas 0:1:0.5 --init 1,-0.5,0.5,1 "
           "--dt 0.01 --t-end 5 --grid 8 --samples 32 --out " + (dir / "spectrum.csv").string(),
       {"spectrum.csv"}},
      {"critical " + data + "/potential.json --seeds 8 --json", {}},
  };
  for (const auto& [args, files] : runs) {
    std::vector<std::string> outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / ("stdout" + std::to_string(rep));
      const int rc = std::system((cli + " " + args + " > " + out.string()).c_str());
      o.require(rc == 0, "exit status " + std::to_string(rc) + " for: " + args);
      outputs[rep].push_back(slurp(out));
      for (const auto& f : files) outputs[rep].push_back(slurp(dir / f));
    }
    o.require(outputs[0] == outputs[1], "outputs differ for: " + args);
    for (const auto& s : outputs[0]) o.require(!s.empty(), "empty output for: " + args);
  }
  const auto csv = slurp(dir / "traj.csv");
  o.require(csv.rfind("# tool=ghg version=", 0) == 0, "trajectory CSV lacks provenance header");
  fs::remove_all(dir);
  if (o.pass) o.detail = std::to_string(runs.size()) + " subcommands, outputs byte-identical";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 when no runtime bound applies
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "closedness of exact fields", 10, closedness},
      {2, "d2 boundedness", 10, boundedness},
      {3, "decomposition soundness", 0, decomposition},
      {4, "orbit example", 5, orbit},
      {5, "divergent example", 1, divergent},
      {6, "potential example", 10, potential},
      {7, "hamiltonian games are vector potential", 0, hamiltonian},
      {8, "flatness at local NE", 0, flatness},
      {9, "near vector potential residual", 0, near_vp},
      {10, "liouville cross-check", 0, liouville},
      {11, "expression layer", 5, expressions},
      {12, "CLI determinism", 0, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs >= c.budget_s) o.require(false, "runtime " + num(secs) + " s over budget");
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %2d  %-40s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
