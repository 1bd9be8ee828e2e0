// ghg: command-line front end for the differential-game toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 input parse/schema error,
// 3 numeric failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ghg/classify.hpp"
#include "ghg/dynamics.hpp"
#include "ghg/error.hpp"
#include "ghg/game.hpp"
#include "ghg/grid.hpp"
#include "ghg/hodge.hpp"
#include "ghg/report_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ghg;

namespace {

constexpr const char* kTool = "ghg";
constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, usage = 1, input = 2, numeric = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    double v = 0;
    const char* first = s.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, s.data() + end, v);
    if (ec != std::errc() || ptr != s.data() + end || first == ptr)
      throw UsageError(std::string("malformed number in ") + what + ": '" + s + "'");
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

std::vector<double> parse_gammas(const std::string& s) {
  std::vector<double> parts;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? s.find(':', pos) : s.size();
    if (end == std::string::npos) throw UsageError("--gammas expects a:b:step");
    parts.push_back(parse_list(s.substr(pos, end - pos), "--gammas")[0]);
    pos = end + 1;
  }
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0) || b < a || a < 0 || b > 1) throw UsageError("--gammas needs 0 <= a <= b <= 1 and step > 0");
  const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
  std::vector<double> g;
  for (long i = 0; i <= n; ++i) g.push_back(std::min(b, a + static_cast<double>(i) * step));
  if (b - g.back() > 1e-9 * std::max(1.0, b)) g.push_back(b);
  return g;
}

// Shared option blocks -------------------------------------------------------

struct Common {
  bool json = false;
  std::uint64_t seed = 0;
};

struct BoxOpt {
  std::vector<double> box;  // lo hi
  Box get(std::size_t n, double lo = -2, double hi = 2) const {
    if (box.empty()) return Box::cube(n, lo, hi);
    if (!(box[1] > box[0])) throw UsageError("--box needs lo < hi");
    return Box::cube(n, box[0], box[1]);
  }
};

struct FlowOpt {
  std::string init;
  std::string method = "rk4";
  double dt = 1e-3;
  double t_end = 50;
  double escape = 1e3;
  std::size_t stride = 1;

  IntegratorConfig config() const {
    IntegratorConfig c;
    c.method = method == "rkf45" ? Method::rkf45 : Method::rk4;
    c.step = dt;
    c.t_end = t_end;
    c.escape_radius = escape;
    c.record_stride = stride;
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return c;
  }

  StrategyProfile x0(const DifferentialGame& g) const {
    const auto v = parse_list(init, "--init");
    if (v.size() != g.dimension())
      throw UsageError("--init has " + std::to_string(v.size()) + " values, the game has " +
                       std::to_string(g.dimension()) + " variables");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
};

void add_common(CLI::App* sc, Common& c) {
  sc->add_flag("--json", c.json, "Machine-readable JSON on stdout");
  sc->add_option("--seed", c.seed, "Sampling seed")->capture_default_str();
}

void add_flow(CLI::App* sc, FlowOpt& f, bool init_required = true) {
  auto* o = sc->add_option("--init", f.init, "Initial profile v1,...,vn");
  if (init_required) o->required();
  sc->add_option("--method", f.method, "Integrator")->check(CLI::IsMember({"rk4", "rkf45"}))->capture_default_str();
  sc->add_option("--dt", f.dt, "Step (rk4) or initial step (rkf45)")->capture_default_str();
  sc->add_option("--t-end", f.t_end, "Final time")->capture_default_str();
  sc->add_option("--escape", f.escape, "Escape radius")->capture_default_str();
  sc->add_option("--stride", f.stride, "Record every k-th step")->capture_default_str();
}

// Output ---------------------------------------------------------------------

std::string g_argv;

json provenance(std::uint64_t seed) { return {{"tool", kTool}, {"version", kVersion}, {"argv", g_argv}, {"seed", seed}}; }

std::string csv_header_comment(std::uint64_t seed) {
  return std::string("# tool=") + kTool + " version=" + kVersion + " seed=" + std::to_string(seed) +
         " argv=" + g_argv + "\n";
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void emit(const Common& c, json j, const std::string& text) {
  if (c.json) {
    j["provenance"] = provenance(c.seed);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

// Subcommands ----------------------------------------------------------------

int run_check(const std::string& path, const Common& c, const BoxOpt& b, std::size_t samples) {
  const auto g = load_game_file(path);
  const SamplerConfig sc{b.get(g.dimension()), samples, c.seed};
  const auto pts = sample_points(sc);
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, double value, double tol) {
    const bool pass = value <= tol;
    all = all && pass;
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
  };

  double jac_fd = 0, div_trace = 0, own_sym = 0;
  for (const auto& p : pts) {
    const auto J = g.jacobian_at(p);
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const double h = 1e-5;
      auto pp = p, pm = p;
      pp[j] += h;
      pm[j] -= h;
      const Eigen::VectorXd col = (g.gradient_at(pp) - g.gradient_at(pm)) / (2 * h);
      jac_fd = std::max(jac_fd, (col - J.col(j)).norm() / (1 + J.norm()));
    }
    div_trace = std::max(div_trace, std::abs(divergence(g, p) - J.trace()));
    for (std::size_t m = 0; m < g.player_count(); ++m) {
      const auto off = static_cast<Eigen::Index>(g.offset(m));
      const auto len = static_cast<Eigen::Index>(g.players()[m].vars.size());
      const Eigen::MatrixXd H = J.block(off, off, len, len);
      own_sym = std::max(own_sym, (H - H.transpose()).cwiseAbs().maxCoeff());
    }
  }
  record("jacobian_vs_finite_difference", jac_fd, 1e-6);
  record("divergence_equals_trace", div_trace, 1e-12);
  record("own_block_hessian_symmetry", own_sym, 1e-12);
  record("strategic_equivalence_reflexive", strategically_equivalent(g, g, sc).max_value, 0.0);

  ClassifyConfig cc;
  cc.sampler = sc;
  const auto rep = classify(g, cc);
  if (rep.hamiltonian) record("hamiltonian_divergence", rep.analytic_div_max, 1e-8);
  if (rep.label == Label::exact_scalar_potential) {
    const auto rec = reconstruct_exact_potential(g, sc);
    record("potential_gradient_residual", rec.max_gradient_residual, 1e-6);
  }
  if (rep.fractions)
    record("energy_fraction_sum", std::abs(rep.fractions->potential + rep.fractions->vector + rep.fractions->harmonic - 1),
           1e-9);

  std::ostringstream text;
  text << "game " << g.name() << ": " << to_string(rep.label) << (rep.hamiltonian ? " (hamiltonian)" : "") << "\n";
  for (const auto& ch : checks)
    text << (ch["pass"].get<bool>() ? "PASS " : "FAIL ") << ch["name"].get<std::string>() << " "
         << fmt17(ch["value"].get<double>()) << "\n";
  emit(c, {{"game", g.name()}, {"label", to_string(rep.label)}, {"checks", checks}, {"passed", all}}, text.str());
  return all ? ok : numeric;
}

ClassifyConfig classify_config(const DifferentialGame& g, const Common& c, const BoxOpt& b, std::size_t grid,
                               std::size_t samples, const std::string& zero_mode) {
  ClassifyConfig cc;
  cc.sampler = {b.get(g.dimension()), samples, c.seed};
  if (grid != 0) {
    try {
      (void)BoxGrid::cube(g.dimension(), 0, 1, grid);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--grid: ") + e.what());
    }
  }
  cc.grid_resolution = grid;
  cc.zero_mode_policy = zero_mode == "vector" ? ZeroModePolicy::to_vector : ZeroModePolicy::to_potential;
  return cc;
}

int run_classify(const std::string& path, const Common& c, const BoxOpt& b, std::size_t grid, std::size_t samples,
                 const std::string& zero_mode) {
  const auto g = load_game_file(path);
  const auto r = classify(g, classify_config(g, c, b, grid, samples, zero_mode));
  std::ostringstream text;
  text << "game " << r.game << "\nlabel " << to_string(r.label) << "\nhamiltonian " << (r.hamiltonian ? "true" : "false")
       << "\nsym_res " << fmt17(r.sym_res) << "\nskew_res " << fmt17(r.skew_res) << "\nanalytic_div_max "
       << fmt17(r.analytic_div_max) << "\n";
  if (r.grid)
    text << "grid " << r.grid_resolution << " div_residual " << fmt17(r.grid->div_residual) << " near_vp_residual "
         << fmt17(r.grid->near_vp_residual) << " curl_residual " << fmt17(r.grid->curl_residual) << "\n";
  if (r.fractions)
    text << "rho_P " << fmt17(r.fractions->potential) << " rho_V " << fmt17(r.fractions->vector) << " rho_harmonic "
         << fmt17(r.fractions->harmonic) << "\n";
  emit(c, r, text.str());
  return ok;
}

int run_decompose(const std::string& path, const Common& c, const BoxOpt& b, std::size_t N, const std::string& zero_mode,
                  const std::string& out_dir) {
  const auto g = load_game_file(path);
  const Box box = b.get(g.dimension());
  std::optional<BoxGrid> grid;
  try {
    grid.emplace(box.lower, box.upper, std::vector<std::size_t>(g.dimension(), N));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
  const auto X = sample_gradient(g, *grid, Window::bump);
  DecompositionConfig dc;
  dc.zero_mode_policy = zero_mode == "vector" ? ZeroModePolicy::to_vector : ZeroModePolicy::to_potential;
  const auto d = decompose(X, dc);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_lattice(dir / "du.ghg", *grid, X.components);
  write_lattice(dir / "phi.ghg", *grid, std::span<const GridScalar>(&d.phi, 1));
  write_lattice(dir / "x_p.ghg", *grid, d.X_P.components);
  write_lattice(dir / "x_v.ghg", *grid, d.X_V.components);
  json diag = {{"game", g.name()},
               {"grid", {{"resolution", N}, {"lower", box.lower}, {"upper", box.upper}, {"window", "bump"}}},
               {"zero_mode_policy", to_string(d.zero_mode_policy)},
               {"harmonic_mean", d.harmonic_mean},
               {"diagnostics", d.diagnostics},
               {"files", {"du.ghg", "phi.ghg", "x_p.ghg", "x_v.ghg"}},
               {"provenance", provenance(c.seed)}};
  write_atomic(dir / "diagnostics.json", diag.dump(2) + "\n");

  std::ostringstream text;
  const auto& dg = d.diagnostics;
  text << "wrote " << (dir / "diagnostics.json").string() << "\nreconstruction_error " << fmt17(dg.reconstruction_error)
       << "\ncurl_residual_P " << fmt17(dg.curl_residual_P) << "\ndiv_residual_V " << fmt17(dg.div_residual_V)
       << "\northogonality_L2 " << fmt17(dg.orthogonality_L2) << "\northogonality_H1 " << fmt17(dg.orthogonality_H1)
       << "\nnear_vp_residual " << fmt17(dg.near_vp_residual) << "\n";
  json j = diag;
  j.erase("provenance");
  emit(c, j, text.str());
  return ok;
}

int run_simulate(const std::string& path, const Common& c, const FlowOpt& f, const std::string& conserved,
                 const std::string& out) {
  const auto g = load_game_file(path);
  const auto cfg = f.config();
  const auto traj = integrate(g, f.x0(g), cfg);
  std::optional<Expr> H;
  if (!conserved.empty()) {
    const auto vars = g.variables();
    H = parse(conserved, {vars.begin(), vars.end()});
  }
  json rep = {{"game", g.name()},
              {"method", to_string(cfg.method)},
              {"terminated_by", to_string(traj.terminated_by)},
              {"t_final", traj.times.back()},
              {"final_state", std::vector<double>(traj.states.back().data(),
                                                  traj.states.back().data() + traj.states.back().size())},
              {"final_norm", traj.states.back().norm()},
              {"records", traj.times.size()},
              {"log_volume_final", traj.log_volume.back()}};
  if (H) rep["conserved_drift"] = conserved_drift(traj, *H);

  if (!out.empty()) {
    std::ostringstream csv;
    csv << csv_header_comment(c.seed) << "t";
    for (const auto& v : traj.variables) csv << "," << v;
    csv << ",log_volume" << (H ? ",conserved" : "") << "\n";
    const BoundExpr bh = H ? BoundExpr(*H, traj.variables) : BoundExpr();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      csv << fmt17(traj.times[k]);
      const auto& x = traj.states[k];
      for (Eigen::Index i = 0; i < x.size(); ++i) csv << "," << fmt17(x[i]);
      csv << "," << fmt17(traj.log_volume[k]);
      if (H) csv << "," << fmt17(bh(std::span<const double>(x.data(), x.size())));
      csv << "\n";
    }
    write_atomic(out, csv.str());
    rep["out"] = out;
  }
  std::ostringstream text;
  text << "terminated_by " << to_string(traj.terminated_by) << "\nt_final " << fmt17(traj.times.back())
       << "\nfinal_norm " << fmt17(traj.states.back().norm()) << "\nlog_volume_final "
       << fmt17(traj.log_volume.back()) << "\n";
  if (H) text << "conserved_drift " << fmt17(rep["conserved_drift"].get<double>()) << "\n";
  emit(c, rep, text.str());
  return ok;
}

int run_recurrence(const std::string& path, const Common& c, const FlowOpt& f, double eps, double t_min) {
  if (!(eps > 0)) throw UsageError("--eps must be positive");
  const auto g = load_game_file(path);
  const auto traj = integrate(g, f.x0(g), f.config());
  const auto r = recurrence(traj, eps, t_min);
  json j = r;
  j["game"] = g.name();
  j["terminated_by"] = to_string(traj.terminated_by);
  std::ostringstream text;
  text << "verdict " << (r.verdict ? "true" : "false") << "\nreturns " << r.return_times.size() << "\n";
  for (double t : r.return_times) text << "return " << fmt17(t) << "\n";
  text << "min_distance_after_t_min " << fmt17(r.min_distance_after_t_min) << "\n";
  emit(c, j, text.str());
  return ok;
}

int run_critical(const std::string& path, const Common& c, const BoxOpt& b, std::size_t seeds) {
  const auto g = load_game_file(path);
  const auto s = find_critical_points(g, b.get(g.dimension()), seeds, {}, c.seed);
  json j = s;
  j["game"] = g.name();
  std::ostringstream text;
  text << "seeds " << s.seeds << " converged " << s.converged << " roots " << s.points.size() << "\n";
  for (const auto& p : s.points) {
    text << "root";
    for (Eigen::Index i = 0; i < p.location.size(); ++i) text << " " << fmt17(p.location[i]);
    text << " local_ne_candidate " << (p.local_ne_candidate ? "true" : "false") << " flatness " << fmt17(p.flatness)
         << "\n";
  }
  emit(c, j, text.str());
  if (s.converged == 0) {
    std::cerr << "ghg: Newton did not converge from any seed\n";
    return numeric;
  }
  return ok;
}

int run_interpolate(const std::string& pa, const std::string& pb, const Common& c, const FlowOpt& f,
                    const std::string& gammas, const BoxOpt& b, std::size_t grid, std::size_t samples,
                    const std::string& out) {
  const auto ga = load_game_file(pa), gb = load_game_file(pb);
  SpectrumConfig cfg;
  cfg.integrator = f.config();
  cfg.initial = f.x0(ga);
  cfg.classify = classify_config(ga, c, b, grid, samples, "potential");
  const auto recs = spectrum_experiment(ga, gb, parse_gammas(gammas), cfg);

  std::ostringstream csv;
  csv << csv_header_comment(c.seed) << "gamma,label,rho_P,rho_V,rho_harmonic,sym_res,skew_res,div_max,summary,final_norm\n";
  for (const auto& r : recs) {
    const auto& rep = r.report;
    auto fr = [&](double EnergyFractions::*m) { return rep.fractions ? fmt17((*rep.fractions).*m) : std::string(); };
    csv << fmt17(r.gamma) << "," << to_string(rep.label) << "," << fr(&EnergyFractions::potential) << ","
        << fr(&EnergyFractions::vector) << "," << fr(&EnergyFractions::harmonic) << "," << fmt17(rep.sym_res) << ","
        << fmt17(rep.skew_res) << "," << fmt17(rep.analytic_div_max) << "," << to_string(r.summary) << ","
        << fmt17(r.final_norm) << "\n";
  }
  if (!out.empty()) write_atomic(out, csv.str());
  json j = {{"records", recs}};
  if (!out.empty()) j["out"] = out;
  emit(c, j, out.empty() ? csv.str() : "wrote " + out + "\n");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_argv += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Differential games: decomposition, classification and gradient-flow dynamics", kTool};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  BoxOpt box;
  FlowOpt flow;
  std::string game, game_b, zero_mode = "potential", out, conserved, gammas;
  std::size_t grid = 0, samples = 256, seeds = 64;
  double eps = 1e-2, t_min = 1.0;

  auto add_game = [&](CLI::App* sc, std::string& target, const char* name) {
    sc->add_option(name, target, "Game JSON file")->required()->check(CLI::ExistingFile);
  };
  auto add_box = [&](CLI::App* sc) { sc->add_option("--box", box.box, "Box bounds lo hi for every axis")->expected(2); };
  auto add_zero = [&](CLI::App* sc) {
    sc->add_option("--zero-mode", zero_mode, "Side receiving the constant mode")
        ->check(CLI::IsMember({"potential", "vector"}))
        ->capture_default_str();
  };

  auto* check = app.add_subcommand("check", "Run the invariant suite on one game");
  add_game(check, game, "game");
  add_common(check, common);
  add_box(check);
  check->add_option("--samples", samples, "Sample count")->capture_default_str();

  auto* cls = app.add_subcommand("classify", "Classify a game");
  add_game(cls, game, "game");
  add_common(cls, common);
  add_box(cls);
  add_zero(cls);
  cls->add_option("--grid", grid, "Grid resolution per axis (0 = automatic)");
  cls->add_option("--samples", samples, "Sample count")->capture_default_str();

  auto* dec = app.add_subcommand("decompose", "Decompose the windowed simultaneous gradient on a grid");
  add_game(dec, game, "game");
  add_common(dec, common);
  add_box(dec);
  add_zero(dec);
  dec->add_option("--grid", grid, "Grid resolution per axis")->required();
  dec->add_option("--out", out, "Output directory")->required();

  auto* sim = app.add_subcommand("simulate", "Integrate the gradient flow");
  add_game(sim, game, "game");
  add_common(sim, common);
  add_flow(sim, flow);
  sim->add_option("--conserved", conserved, "Expression tracked along the trajectory");
  sim->add_option("--out", out, "Trajectory CSV");

  auto* rec = app.add_subcommand("recurrence", "Test for returns near the initial point");
  add_game(rec, game, "game");
  add_common(rec, common);
  add_flow(rec, flow);
  rec->add_option("--eps", eps, "Return radius")->capture_default_str();
  rec->add_option("--t-min", t_min, "Ignore returns before this time")->capture_default_str();

  auto* crit = app.add_subcommand("critical", "Locate critical points of Du");
  add_game(crit, game, "game");
  add_common(crit, common);
  add_box(crit);
  crit->add_option("--seeds", seeds, "Newton seeds")->capture_default_str();

  auto* itp = app.add_subcommand("interpolate", "Sweep gamma * A + (1 - gamma) * B");
  add_game(itp, game, "game_a");
  add_game(itp, game_b, "game_b");
  add_common(itp, common);
  add_flow(itp, flow);
  add_box(itp);
  itp->add_option("--gammas", gammas, "Inclusive range a:b:step")->required();
  itp->add_option("--grid", grid, "Grid resolution per axis (0 = automatic)");
  itp->add_option("--samples", samples, "Sample count")->capture_default_str();
  itp->add_option("--out", out, "Spectrum CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  try {
    if (*check) return run_check(game, common, box, samples);
    if (*cls) return run_classify(game, common, box, grid, samples, zero_mode);
    if (*dec) return run_decompose(game, common, box, grid, zero_mode, out);
    if (*sim) return run_simulate(game, common, flow, conserved, out);
    if (*rec) return run_recurrence(game, common, flow, eps, t_min);
    if (*crit) return run_critical(game, common, box, seeds);
    if (*itp) return run_interpolate(game, game_b, common, flow, gammas, box, grid, samples, out);
  } catch (const UsageError& e) {
    std::cerr << "ghg: " << e.what() << "\n";
    return usage;
  } catch (const ParseError& e) {
    std::cerr << "ghg: parse error: " << e.what() << "\n";
    return input;
  } catch (const SchemaError& e) {
    std::cerr << "ghg: schema error: " << e.what() << "\n";
    return input;
  } catch (const StructureMismatch& e) {
    std::cerr << "ghg: structure mismatch: " << e.what() << "\n";
    return input;
  } catch (const EnvError& e) {
    std::cerr << "ghg: " << e.what() << "\n";
    return input;
  } catch (const Error& e) {
    std::cerr << "ghg: numeric failure: " << e.what() << "\n";
    return numeric;
  } catch (const std::exception& e) {
    std::cerr << "ghg: " << e.what() << "\n";
    return input;
  }
  return usage;
}
