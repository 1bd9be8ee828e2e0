#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "ghg_cli_test";

std::string game(const char* name) { return std::string(GHG_DATA_DIR) + "/" + name + ".json"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  fs::create_directories(kDir);
  const auto o = kDir / "stdout", e = kDir / "stderr";
  const int status = std::system((std::string(GHG_CLI) + " " + args + " > " + o.string() + " 2> " + e.string()).c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

}  // namespace

TEST_CASE("simulate records the invariant column") {
  const auto csv = kDir / "traj.csv";
  const auto r = run("simulate " + game("orbit") +
                     " --init 1,0 --dt 0.001 --t-end 50 --conserved \"y^2/2 + x^2/2 + x^4/4\" --out " + csv.string());
  REQUIRE(r.code == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# tool=ghg version=0.1.0 seed=0 argv=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "t,x,y,log_volume,conserved");
  double c0 = 0, worst = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const double c = std::stod(line.substr(line.rfind(',') + 1));
    if (rows++ == 0) c0 = c;
    worst = std::max(worst, std::abs(c - c0));
  }
  CHECK(rows == 50001);
  CHECK(c0 == 0.75);
  CHECK(worst <= 1e-6);
}

TEST_CASE("classify reports the vector potential example") {
  const auto r = run("classify " + game("vpexample") + " --json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["label"] == "vector-potential");
  CHECK(j["hamiltonian"] == false);
  CHECK(j["provenance"]["tool"] == "ghg");
  CHECK(j["provenance"]["seed"] == 0);
}

TEST_CASE("simulate reports escape") {
  const auto r = run("simulate " + game("drift") + " --init 1,0 --t-end 50 --json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["terminated_by"] == "escape");
  CHECK(j["t_final"].get<double>() < 10.0);
}

TEST_CASE("decompose writes lattices and diagnostics") {
  const auto dir = kDir / "dec";
  const auto r = run("decompose " + game("orbit") + " --grid 32 --box -3 3 --zero-mode vector --out " + dir.string());
  REQUIRE(r.code == 0);
  for (const char* f : {"du.ghg", "phi.ghg", "x_p.ghg", "x_v.ghg"}) CHECK(fs::exists(dir / f));
  CHECK(fs::file_size(dir / "x_p.ghg") == 4 + 4 + 8 + 32 + 2 * 32 * 32 * 8);
  const auto j = nlohmann::json::parse(slurp(dir / "diagnostics.json"));
  CHECK(j["zero_mode_policy"] == "to_vector");
  CHECK(j["diagnostics"]["reconstruction_error"].get<double>() <= 1e-12);
  CHECK(j.contains("provenance"));
}

TEST_CASE("recurrence and critical") {
  const auto r = run("recurrence " + game("orbit") + " --init 1,0 --eps 0.01 --t-min 1 --t-end 20 --json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == true);

  const auto c = run("critical " + game("vpexample") + " --seeds 8 --json");
  REQUIRE(c.code == 0);
  CHECK(nlohmann::json::parse(c.out)["points"].size() == 1);
}

TEST_CASE("interpolate writes the spectrum table") {
  const auto csv = kDir / "spectrum.csv";
  const auto r = run("interpolate " + game("interp_sp") + " " + game("interp_vp") +
                     " --gammas 0:1:0.25 --init 1,-0.5,0.5,1 --dt 0.01 --t-end 5 --grid 8 --samples 32 --out " +
                     csv.string());
  REQUIRE(r.code == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# tool=ghg", 0) == 0);
  std::getline(in, line);
  CHECK(line == "gamma,label,rho_P,rho_V,rho_harmonic,sym_res,skew_res,div_max,summary,final_norm");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 1);
  CHECK(run("bogus").code == 1);
  CHECK(run("classify " + (kDir / "missing.json").string()).code == 1);
  CHECK(run("simulate " + game("orbit") + " --init 1").code == 1);
  CHECK(run("simulate " + game("orbit") + " --init 1,x").code == 1);
  CHECK(run("simulate " + game("orbit") + " --init 1,0 --method euler").code == 1);
  CHECK(run("decompose " + game("orbit") + " --grid 12 --out " + (kDir / "d12").string()).code == 1);

  fs::create_directories(kDir);
  {
    std::ofstream(kDir / "broken.json") << R"({"players":[{"name":"a","vars":["x"],"utility":"x*"}]})";
    std::ofstream(kDir / "schema.json") << R"({"players":"nope"})";
  }
  const auto p = run("classify " + (kDir / "broken.json").string());
  CHECK(p.code == 2);
  CHECK_FALSE(p.err.empty());
  CHECK(run("classify " + (kDir / "schema.json").string()).code == 2);
  CHECK(run("simulate " + game("orbit") + " --init 1,0 --conserved \"q + 1\"").code == 2);
  CHECK(run("interpolate " + game("orbit") + " " + game("interp_vp") + " --gammas 0:1:0.5 --init 1,0").code == 2);

  // Du = (1 + x^2, 1) has no zero
  std::ofstream(kDir / "nozero.json") << R"({"players":[{"name":"a","vars":["x"],"utility":"x + x^3/3"},)"
                                      << R"({"name":"b","vars":["y"],"utility":"y"}]})";
  CHECK(run("critical " + (kDir / "nozero.json").string() + " --seeds 4").code == 3);
}

TEST_CASE("identical invocations give identical bytes") {
  const std::string args = "classify " + game("orbit") + " --json --grid 16 --samples 32 --seed 5";
  const auto a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto csv = kDir / "det.csv";
  const std::string sim = "simulate " + game("potential") + " --init 1,1,-1,0.5 --method rkf45 --t-end 5 --out " +
                          csv.string();
  REQUIRE(run(sim).code == 0);
  const auto first = slurp(csv);
  REQUIRE(run(sim).code == 0);
  CHECK(slurp(csv) == first);
  CHECK_FALSE(fs::exists(fs::path(csv.string() + ".tmp")));
}
