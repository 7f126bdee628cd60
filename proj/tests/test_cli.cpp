#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nhfp/csv.hpp"
#include "nhfp/errors.hpp"
#include "nhfp/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NHFP_CLI_PATH) + " " + args;
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nhfp_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// fast-but-real settings for file format tests
const std::string small_bands =
    "--set bands.nk=32 --set bands.n_harmonics=15 --set model.omega=2.0";

}  // namespace

TEST_CASE("config: defaults, overrides, unknown keys, bad values") {
  nhfp::RunConfig cfg;
  cfg.apply_override("model.gamma0=0.8");
  CHECK(cfg.model.gamma0 == 0.8);
  cfg.apply_override("evolve.input=B");
  CHECK(cfg.evolve.input == "B");
  CHECK_THROWS_AS(cfg.apply_override("model.nonsense=1"), nhfp::invalid_argument);
  CHECK_THROWS_AS(cfg.apply_override("gamma0=0.8"), nhfp::invalid_argument);
  CHECK_THROWS_AS(cfg.apply_override("model.gamma0=abc"), nhfp::invalid_argument);

  CHECK_THROWS_AS(nhfp::RunConfig::from_json(json{{"modle", json::object()}}),
                  nhfp::invalid_argument);
  CHECK_THROWS_AS(
      nhfp::RunConfig::from_json(json{{"model", {{"gamma0", -1.0}}}}),
      nhfp::invalid_argument);
  CHECK_THROWS_AS(
      nhfp::RunConfig::from_json(json{{"evolve", {{"input", "C"}}}}),
      nhfp::invalid_argument);

  // round trip through JSON preserves every field
  const json j = cfg.to_json();
  const nhfp::RunConfig back = nhfp::RunConfig::from_json(j);
  CHECK(back.to_json() == j);
}

TEST_CASE("bands output: deterministic bytes, parseable header, row order") {
  const fs::path dir1 = fresh_dir("bands1");
  const fs::path dir2 = fresh_dir("bands2");
  REQUIRE(run_cli("bands --out " + dir1.string() + " " + small_bands) == 0);
  REQUIRE(run_cli("bands --out " + dir2.string() + " " + small_bands) == 0);
  const std::string a = slurp(dir1 / "bands.csv");
  CHECK(a == slurp(dir2 / "bands.csv"));
  CHECK(a.find("k,band,re_eps_folded,im_eps,re_eps_unfolded") != std::string::npos);

  const json header = nhfp::read_csv_header((dir1 / "bands.csv").string());
  CHECK(header["command"] == "bands");
  CHECK(header["config"]["bands"]["nk"] == 32);

  // rows: k ascending (outer), band 1 then 2 (inner)
  std::ifstream in(dir1 / "bands.csv");
  std::string line;
  std::getline(in, line);  // header
  std::getline(in, line);  // column names
  double prev_k = -1e300;
  int expected_band = 1;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    const double k = std::stod(field);
    std::getline(ss, field, ',');
    CHECK(std::stoi(field) == expected_band);
    if (expected_band == 1) CHECK(k > prev_k);
    prev_k = k;
    expected_band = expected_band == 1 ? 2 : 1;
    ++rows;
  }
  CHECK(rows == 64);
}

TEST_CASE("config round trip: rerunning from the embedded header reproduces bytes") {
  const fs::path dir1 = fresh_dir("rt1");
  const fs::path dir2 = fresh_dir("rt2");
  REQUIRE(run_cli("bands --out " + dir1.string() + " " + small_bands) == 0);
  const json header = nhfp::read_csv_header((dir1 / "bands.csv").string());
  const fs::path cfg_file = dir2 / "config.json";
  std::ofstream(cfg_file) << header["config"].dump();
  REQUIRE(run_cli("bands --out " + dir2.string() + " --config " +
                  cfg_file.string()) == 0);
  CHECK(slurp(dir1 / "bands.csv") == slurp(dir2 / "bands.csv"));
}

TEST_CASE("determinism is independent of the thread count") {
  const fs::path dir1 = fresh_dir("thr1");
  const fs::path dir2 = fresh_dir("thr2");
  const std::string base = "bands " + small_bands;
  REQUIRE(std::system((std::string("NHFP_THREADS=1 ") + NHFP_CLI_PATH + " " +
                       base + " --out " + dir1.string() + " >/dev/null")
                          .c_str()) == 0);
  REQUIRE(std::system((std::string("NHFP_THREADS=2 ") + NHFP_CLI_PATH + " " +
                       base + " --out " + dir2.string() + " >/dev/null")
                          .c_str()) == 0);
  CHECK(slurp(dir1 / "bands.csv") == slurp(dir2 / "bands.csv"));
}

TEST_CASE("gapscan output is thread-count independent") {
  const std::string args =
      "gapscan --set gapscan.omega_min=1.3 --set gapscan.omega_max=1.3"
      " --set gapscan.omega_count=1 --set gapscan.gamma_count=3"
      " --set gapscan.gamma_max=0.4 --set gapscan.k_points=32";
  const fs::path dir1 = fresh_dir("scan_thr1");
  const fs::path dir2 = fresh_dir("scan_thr2");
  REQUIRE(std::system((std::string("NHFP_THREADS=1 ") + NHFP_CLI_PATH + " " +
                       args + " --out " + dir1.string() + " >/dev/null")
                          .c_str()) == 0);
  REQUIRE(std::system((std::string("NHFP_THREADS=2 ") + NHFP_CLI_PATH + " " +
                       args + " --out " + dir2.string() + " >/dev/null")
                          .c_str()) == 0);
  CHECK(slurp(dir1 / "gapscan.csv") == slurp(dir2 / "gapscan.csv"));
  CHECK(slurp(dir1 / "gapscan_threshold.csv") ==
        slurp(dir2 / "gapscan_threshold.csv"));
}

TEST_CASE("gapscan writes the matrix and threshold files") {
  const fs::path dir = fresh_dir("scan");
  REQUIRE(run_cli("gapscan --out " + dir.string() +
                  " --set gapscan.omega_min=1.1 --set gapscan.omega_max=1.1"
                  " --set gapscan.omega_count=1 --set gapscan.gamma_count=5"
                  " --set gapscan.gamma_max=0.4 --set gapscan.k_points=48") == 0);
  CHECK(fs::exists(dir / "gapscan.csv"));
  CHECK(fs::exists(dir / "gapscan_threshold.csv"));
  std::ifstream in(dir / "gapscan_threshold.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream row(line);
  std::string omega_field, gamma_field;
  std::getline(row, omega_field, ',');
  std::getline(row, gamma_field, ',');
  CHECK(std::stod(omega_field) == doctest::Approx(1.1));
  const double gamma_star = std::stod(gamma_field);
  CHECK(gamma_star > 0.1);
  CHECK(gamma_star <= 0.4);
}

TEST_CASE("evolve writes CoM series with summary; --si rescales") {
  const fs::path dir = fresh_dir("evolve");
  const std::string small =
      "--set evolve.n_cells=61 --set evolve.cycles=5"
      " --set evolve.steps_per_cycle=500 --set evolve.snapshots_per_cycle=5";
  REQUIRE(run_cli("evolve --out " + dir.string() + " " + small) == 0);
  const std::string plain = slurp(dir / "evolve_com_A.csv");
  CHECK(plain.find("\"summary\"") != std::string::npos);
  CHECK(plain.find("per_cycle_displacement") != std::string::npos);

  const fs::path dir_si = fresh_dir("evolve_si");
  REQUIRE(run_cli("evolve --si --out " + dir_si.string() + " " + small) == 0);
  const json h = nhfp::read_csv_header((dir_si / "evolve_com_A.csv").string());
  CHECK(h["si"] == true);
  CHECK(h["si_factors"]["j0_per_um"] == 0.144);

  // value scaling: t in um (1/j0 = 6.94 um), CoM in um (a0 = 3.4 um)
  auto second_row = [](const fs::path& f) {
    std::ifstream in(f);
    std::string line;
    for (int i = 0; i < 4; ++i) std::getline(in, line);
    std::istringstream ss(line);
    std::vector<double> vals;
    std::string field;
    while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
    return vals;
  };
  const auto plain_row = second_row(dir / "evolve_com_A.csv");
  const auto si_row = second_row(dir_si / "evolve_com_A.csv");
  CHECK(si_row[0] == doctest::Approx(plain_row[0] / 0.144));
  CHECK(si_row[2] == doctest::Approx(plain_row[2] * 3.4));
  CHECK(si_row[3] == doctest::Approx(plain_row[3]));  // norm is unitless
}

TEST_CASE("empty k grid and bad config are validation errors") {
  CHECK(run_cli("bands --set bands.nk=0 2>/dev/null") == 1);
  CHECK(run_cli("bands --set model.omega=-1 2>/dev/null") == 1);
  const fs::path dir = fresh_dir("badcfg");
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(run_cli("bands --config " + (dir / "broken.json").string() +
                " 2>/dev/null") == 1);
  std::ofstream(dir / "unknown.json") << R"({"model": {"omga": 1.1}})";
  CHECK(run_cli("bands --config " + (dir / "unknown.json").string() +
                " 2>/dev/null") == 1);
}

TEST_CASE("format_double writes 17 significant digits") {
  CHECK(nhfp::format_double(1.0) == "1");
  CHECK(nhfp::format_double(0.1) == "0.10000000000000001");
  CHECK(nhfp::format_double(-3.1415926535897931) == "-3.1415926535897931");
}
