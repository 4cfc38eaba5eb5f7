#include "gainflow/cli.hpp"
#include "gainflow/io.hpp"
#include "gainflow/specs.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace gainflow;
namespace fs = std::filesystem;

namespace {

const std::string kDir = GAINFLOW_SCENARIO_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gainflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "gainflow_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string small_scenario() {
  auto path = scratch("small.scenario");
  std::ofstream(path) << "name: small\ngame: {type: good_rps}\ndynamic: {type: smith}\n"
                         "initial_state: [0.9, 0.05, 0.05]\nintegrator: {dt: 0.01, horizon: 2}\n";
  return path.string();
}

}  // namespace

TEST_CASE("simulate writes the trajectory CSV") {
  auto out = scratch("traj.csv");
  fs::remove(out);
  auto r = cli({"simulate", "--scenario", small_scenario(), "--out", out.string()});
  CHECK(r.code == kExitOk);
  auto table = read_csv(out.string());
  std::vector<std::string> want = {"t", "x1", "x2", "x3", "pi1", "pi2", "pi3", "G", "H", "Gamma",
                                   "nash_gap"};
  CHECK(table.header == want);
  CHECK(table.rows.size() == 201);
  CHECK(table.rows[0][1] == 0.9);
}

TEST_CASE("simulate can also write JSON and a plot script") {
  auto csv = scratch("traj2.csv"), json = scratch("traj2.json"), plot = scratch("traj2.gp");
  auto r = cli({"simulate", "--scenario", small_scenario(), "--out", csv.string(), "--json",
                json.string(), "--plot", plot.string()});
  CHECK(r.code == kExitOk);
  auto j = nlohmann::json::parse(std::ifstream(json));
  CHECK(j["times"].size() == 201);
  CHECK(j["game"] == "good_rps");
  std::stringstream gp;
  gp << std::ifstream(plot).rdbuf();
  CHECK(gp.str().find(csv.string()) != std::string::npos);
}

TEST_CASE("check-protocol and check-game exit codes") {
  auto ok = cli({"check-protocol", "--spec", "smith", "--actions", "5"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("a1ii") != std::string::npos);
  auto fixture = cli({"check-protocol", "--spec", "a1ii_fixture_1"});
  CHECK(fixture.code == kExitFailure);
  CHECK(fixture.out.find("0.6") != std::string::npos);

  CHECK(cli({"check-game", "--spec", "good_rps"}).code == kExitOk);
  auto bad = cli({"check-game", "--spec", "bad_rps"});
  CHECK(bad.code == kExitFailure);
  CHECK(bad.out.find("\"stable\": false") != std::string::npos);
}

TEST_CASE("audit and properties commands") {
  auto report = scratch("audit.json");
  auto r = cli({"audit", "--scenario", kDir + "/rps_smith.scenario", "--out", report.string()});
  CHECK(r.code == kExitOk);
  auto j = nlohmann::json::parse(std::ifstream(report));
  CHECK(j["audits"].size() >= 2);

  CHECK(cli({"properties", "--spec", "smith", "--actions", "3", "--trials", "30"}).code == kExitOk);
  CHECK(cli({"properties", "--spec", "a1ii_fixture_1", "--trials", "200"}).code == kExitFailure);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"simulate"}).code == kExitUsage);
  CHECK(cli({"check-protocol", "--spec", "smith", "--actions", "many"}).code == kExitUsage);
  CHECK(cli({"check-protocol", "--spec", "nonsense"}).code == kExitUsage);
  auto r = cli({"simulate", "--scenario", "/nonexistent/x.scenario"});
  CHECK(r.code == kExitUsage);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("unwritable output exits with 3") {
  auto r = cli({"simulate", "--scenario", small_scenario(), "--out", "/nonexistent/dir/t.csv"});
  CHECK(r.code == kExitUnwritable);
}

TEST_CASE("sweep runs scenarios side by side") {
  auto dir = scratch("sweep");
  fs::create_directories(dir);
  auto r = cli({"simulate", "--sweep", small_scenario(), kDir + "/rps_bnn.scenario", "--out-dir",
                dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(dir / "small.csv"));
  CHECK(fs::exists(dir / "rps_bnn.csv"));
}

TEST_CASE("CSV round trip is exact") {
  auto traj = simulate(games::friedman(),
                       MeanDynamic::rationalizable(protocols::friedman_asymmetric()),
                       SimplexState{0.6, 0.3, 0.1}, [] {
                         IntegratorConfig c;
                         c.horizon = 1.0;
                         return c;
                       }());
  traj.add_aux("extra") = std::vector<double>(traj.size(), 1.0 / 3.0);
  std::stringstream ss;
  write_csv(traj, ss);
  auto table = read_csv(ss);
  CHECK(table.header.back() == "extra");
  REQUIRE(table.rows.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(table.rows[i][table.column("t")] == traj.times[i]);
    CHECK(table.rows[i][table.column("x2")] == traj.states[i][1]);
    CHECK(table.rows[i][table.column("pi3")] == traj.payoffs[i][2]);
    CHECK(table.rows[i][table.column("G")] == traj.G[i]);
    CHECK(table.rows[i][table.column("H")] == traj.H[i]);
    CHECK(table.rows[i][table.column("Gamma")] == traj.Gamma[i]);
    CHECK(table.rows[i][table.column("nash_gap")] == traj.nash_gap[i]);
    CHECK(table.rows[i][table.column("extra")] == 1.0 / 3.0);
  }
  CHECK_THROWS_AS(table.column("missing"), ArgumentError);
}
