#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "io.hpp"
#include "swe/hash.hpp"

using namespace swe;
using namespace swe::cli;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"([grid]
n_cells = 32
horizon = 0.5
courant = 0.4
c_cfl = 0.9

[problem]
kind = ic

[truth]
recipe = gaussian
amplitude = 0.05
center = 0.0
width = 0.25

[observations]
station_count = 8
station_layout = staggered

[optimizer]
max_iters = 3000
rel_tol = 1e-10

[kappa]
eps_min = 1e-8
eps_max = 1e-2
eps_count = 7
hvp_trials = 2
symmetry_trials = 3

[sensitivity]
response = point_height
x0 = 0.03125
rel_tol = 1e-9
)";

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "swe_cli_tests" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

int run(const std::string& cmd, const std::string& text, const fs::path& dir, bool oracle = false) {
  CommandOptions o;
  o.config = parse_config(text);
  o.out_dir = dir;
  o.oracle = oracle;
  return run_command(cmd, o);
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("number formatting", "[cli]") {
  CHECK(format_double(0.0) == "0.0000000000000000e+00");
  CHECK(format_double(1.0 / 3.0) == "3.3333333333333331e-01");
  CHECK(format_double(-2.5e-300) == "-2.5000000000000000e-300");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("config parsing", "[cli]") {
  const RunConfig c = parse_config(kBase);
  CHECK(c.n_cells == 32);
  CHECK(c.kind == ControlKind::InitialCondition);
  CHECK(c.truth.name == "gaussian");
  CHECK(c.truth.params.at("width") == 0.25);
  CHECK(c.known.name == "zero");
  CHECK(c.station_count == 8);
  CHECK(c.optimizer.rel_tol == 1e-10);
  CHECK(c.raw == kBase);

  const Grid g = make_grid(c);
  const Eigen::VectorXd st = make_stations(c, g);
  CHECK(st.size() == 8);
  CHECK(st[0] == g.x(2));
  CHECK(st[1] == g.x(7));

  const RunConfig explicit_st = parse_config(replace(kBase, "station_count = 8", "stations = -0.5, 0.25 ,0.75"));
  CHECK(explicit_st.stations == std::vector<double>{-0.5, 0.25, 0.75});

  CHECK_THROWS_AS(parse_config(replace(kBase, "[grid]", "[gird]")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "n_cells = 32", "n_cels = 32")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "n_cells = 32", "n_cells = 3x2")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "kind = ic", "kind = both")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "response = point_height", "response = flux")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kBase, "station_count = 8", "station_count = 8\nstations = 0.1")), ConfigError);
  CHECK_THROWS_AS(make_field(parse_config(replace(kBase, "recipe = gaussian", "recipe = volcano")).truth, g),
                  ConfigError);
  CHECK_THROWS_AS(make_field(parse_config(replace(kBase, "width = 0.25", "")).truth, g), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("forward: snapshots, mass and determinism", "[cli]") {
  const fs::path a = fresh_dir("forward_a");
  const fs::path b = fresh_dir("forward_b");
  REQUIRE(run("forward", kBase, a) == kOk);
  REQUIRE(run("forward", kBase, b) == kOk);
  for (const char* f : {"snapshots.csv", "mass.csv"}) CHECK(slurp(a / f) == slurp(b / f));

  const auto snaps = read_csv(a / "snapshots.csv");
  CHECK(snaps.front() == std::vector<std::string>{"level", "time", "x", "eta", "u"});
  CHECK(snaps.size() == 1 + 5 * 32);
  const auto mass_rows = read_csv(a / "mass.csv");
  const double m0 = std::stod(mass_rows[1][2]);
  for (std::size_t i = 1; i < mass_rows.size(); ++i) CHECK(std::abs(std::stod(mass_rows[i][2]) - m0) <= 1e-10);

  const nlohmann::json m = manifest(a);
  CHECK(m["config_sha256"] == sha256_hex(kBase));
  CHECK(m["exit_code"] == 0);
  CHECK(m["code_version"].is_string());
  CHECK(m["stages"].size() == 2);

  int manifests = 0;
  for (const auto& e : fs::directory_iterator(a)) manifests += e.path().extension() == ".json";
  CHECK(manifests == 1);

  const fs::path rest = fresh_dir("forward_rest");
  REQUIRE(run("forward", replace(kBase, "recipe = gaussian", "recipe = zero"), rest) == kOk);
  for (const auto& row : read_csv(rest / "snapshots.csv")) {
    if (row[0] == "level") continue;
    CHECK(std::stod(row[3]) == 0.0);
    CHECK(std::stod(row[4]) == 0.0);
  }
}

TEST_CASE("assimilate", "[cli]") {
  const fs::path dir = fresh_dir("assimilate");
  REQUIRE(run("assimilate", kBase, dir) == kOk);
  const auto rows = read_csv(dir / "descent.csv");
  CHECK(rows.front() == std::vector<std::string>{"iteration", "cost", "grad_norm", "step"});
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) <= std::stod(rows[i - 1][1]));
  CHECK(read_csv(dir / "control.csv").size() == 33);
  CHECK(manifest(dir)["results"]["error_reduction"].get<double>() > 10.0);

  // The truth as first guess: a single-row report.
  const fs::path at = fresh_dir("assimilate_truth");
  const std::string guess = "[first_guess]\nrecipe = gaussian\namplitude = 0.05\ncenter = 0.0\nwidth = 0.25\n";
  REQUIRE(run("assimilate", std::string(kBase) + guess, at) == kOk);
  CHECK(read_csv(at / "descent.csv").size() == 2);
}

TEST_CASE("kappa and hvp-check", "[cli]") {
  const fs::path a = fresh_dir("kappa_a");
  const fs::path b = fresh_dir("kappa_b");
  REQUIRE(run("kappa", kBase, a) == kOk);
  REQUIRE(run("kappa", kBase, b) == kOk);
  CHECK(slurp(a / "kappa.csv") == slurp(b / "kappa.csv"));
  const auto rows = read_csv(a / "kappa.csv");
  CHECK(rows.size() == 8);
  bool plateau1 = false, plateau2 = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double eps = std::stod(rows[i][0]);
    if (eps < 1e-6 - 1e-18 || eps > 1e-3 + 1e-15) continue;
    plateau1 |= std::abs(std::stod(rows[i][1]) - 1.0) <= 1e-3;
    plateau2 |= std::abs(std::stod(rows[i][2]) - 1.0) <= 1e-3;
  }
  CHECK(plateau1);
  CHECK(plateau2);

  const fs::path h = fresh_dir("hvp");
  REQUIRE(run("hvp-check", kBase, h) == kOk);
  for (const auto& row : read_csv(h / "hvp_check.csv")) {
    if (row[0] == "trial") continue;
    CHECK(std::stod(row[3]) <= 1e-3);
    CHECK(std::stod(row[4]) <= 1e-3);
  }
  CHECK(std::stod(read_csv(h / "symmetry.csv")[1][1]) <= 1e-3);
}

TEST_CASE("sensitivity with the oracle", "[cli]") {
  const std::string text = replace(kBase, "station_count = 8", "station_count = 8\nstart_level = 2\nstride = 2");
  const fs::path dir = fresh_dir("sensitivity");
  REQUIRE(run("sensitivity", text, dir, true) == kOk);
  const nlohmann::json m = manifest(dir);
  double cg_rel = -1.0;
  for (const auto& st : m["stages"]) {
    if (st["name"] == "sensitivity") cg_rel = st["summary"]["cg_relative_residual"];
  }
  CHECK(cg_rel >= 0.0);
  CHECK(cg_rel <= 1e-9);
  for (const auto& row : read_csv(dir / "oracle.csv")) {
    if (row[0] == "station") continue;
    CHECK(std::stod(row[4]) <= 1e-2);
  }
  CHECK(read_csv(dir / "dG_dm.csv").front() == std::vector<std::string>{"station", "x", "level", "time", "value"});
  CHECK(fs::exists(dir / "nu.csv"));
  CHECK(fs::exists(dir / "cg_residual.csv"));

  const fs::path zero = fresh_dir("sensitivity_zero");
  REQUIRE(run("sensitivity", replace(text, "response = point_height", "response = zero"), zero) == kOk);
  for (const auto& row : read_csv(zero / "dG_dm.csv")) {
    if (row[0] != "station") CHECK(std::stod(row[4]) == 0.0);
  }
}

TEST_CASE("exit codes", "[cli]") {
  CommandOptions bad;
  bad.out_dir = fresh_dir("exit_unknown");
  bad.config = parse_config(kBase);
  CHECK(run_command("nope", bad) == kConfig);

  CHECK(run("forward", replace(kBase, "n_cells = 32", "n_cells = 2"), fresh_dir("exit_grid")) == kConfig);
  const std::string tall = replace(replace(kBase, "c_cfl = 0.9", "c_cfl = 0.45"), "amplitude = 0.05", "amplitude = 0.5");
  CHECK(run("forward", tall, fresh_dir("exit_cfl")) == kSolver);

  const fs::path stall = fresh_dir("exit_stall");
  CHECK(run("assimilate", std::string(kBase) + "", stall) == kOk);
  const std::string stall_cfg = replace(kBase, "rel_tol = 1e-10", "rel_tol = 1e-10\narmijo_c1 = 0.9999\nmax_halvings = 1");
  CHECK(run("assimilate", stall_cfg, stall) == kOptimizer);
  CHECK(fs::exists(stall / "descent.csv"));
  CHECK(manifest(stall)["exit_code"] == kOptimizer);

  CHECK(run("sensitivity", replace(kBase, "max_iters = 3000", "max_iters = 2"), fresh_dir("exit_pre")) == kOptimizer);

  const std::string guess = "[first_guess]\nrecipe = gaussian\namplitude = 0.05\ncenter = 0.0\nwidth = 0.25\n";
  CHECK(run("kappa", std::string(kBase) + guess, fresh_dir("exit_degenerate")) == kDegenerate);

  const fs::path cg = fresh_dir("exit_cg");
  CHECK(run("sensitivity", replace(kBase, "rel_tol = 1e-9", "rel_tol = 1e-9\nmax_iter = 2"), cg) == kCgFailure);
  CHECK(read_csv(cg / "cg_residual.csv").size() == 4);

  auto code = [](auto e) { return exit_code_for(std::make_exception_ptr(e)); };
  CHECK(code(ConfigError("x")) == 2);
  CHECK(code(DomainError("x")) == 2);
  CHECK(code(DryingError("x", 1)) == 3);
  CHECK(code(DivergenceError("x", 1)) == 3);
  CHECK(code(StallError("x", DescentReport{})) == 4);
  CHECK(code(OracleError("x", 0, 0)) == 4);
  CHECK(code(DegenerateDirectionError("x")) == 5);
  CHECK(code(NotPositiveDefiniteError("x", Field(), -1.0)) == 6);
  CHECK(code(CgNonConvergenceError("x", {})) == 6);
}

TEST_CASE("epsilon sweep", "[cli]") {
  const std::vector<double> e = epsilon_sweep(1e-12, 1e-1, 23);
  CHECK(e.size() == 23);
  CHECK(e.front() == Catch::Approx(1e-1));
  CHECK(e.back() == Catch::Approx(1e-12));
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] < e[i - 1]);
}
