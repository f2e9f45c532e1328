#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "approx.hpp"
#include "doctest.h"
#include "json.hpp"
#include "sheq/bounds.hpp"
#include "sheq/cli.hpp"
#include "sheq/io.hpp"

using namespace sheq;
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& name) {
  static std::atomic<int> counter{0};
  const fs::path p = fs::temp_directory_path() / ("sheq_test_" + std::to_string(::getpid()) + "_" +
                                                 std::to_string(counter++) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sheq");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(int(argv.size()), argv.data());
}

fs::path write_model(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "model.json";
  io::write_file(p, text);
  return p;
}

const char* kPam = R"({
  "schema_version": 1,
  "d": 1,
  "exponent": {"family": "isotropic_stable", "index": 2.0, "scale": 1.0},
  "kernel": {"family": "riesz", "b": 0.5},
  "sigma": {"pam": 1.0},
  "initial": {"kind": "bounded", "inf": 1.0, "sup": 1.0}
})";

Json read_json(const fs::path& p) { return Json::parse(io::read_file(p)); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(io::read_file(p));
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("model JSON round trip") {
    const fs::path d = scratch("roundtrip");
    const ModelSpec m = io::load_model(write_model(d, kPam));
    CHECK(m.sigma.linear_kappa.value() == 1.0);
    const Json j = io::to_json(m);
    const ModelSpec back = io::model_from_json(j);
    CHECK(io::to_json(back).dump() == j.dump());
    CHECK(j.at("schema_version").get<int>() == io::kSchemaVersion);

    LatticeSpec s;
    s.n = 32;
    s.seed = 77;
    CHECK(io::to_json(io::lattice_from_json(io::to_json(s))).dump() == io::to_json(s).dump());
  }

  TEST_CASE("strict parsing rejects typos and wrong versions") {
    Json j = Json::parse(kPam);
    j["kernel"]["bb"] = 0.3;
    CHECK_THROWS(io::model_from_json(j));
    Json v = Json::parse(kPam);
    v["schema_version"] = 2;
    CHECK_THROWS(io::model_from_json(v));
    Json u = Json::parse(kPam);
    u["extra"] = 1;
    CHECK_THROWS(io::model_from_json(u));
  }

  TEST_CASE("grid and sweep parsing") {
    const auto g = cli::parse_log_grid("1e-2:1e2:5");
    REQUIRE(g.size() == 5);
    CHECK(g[2] == rel(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(cli::parse_log_grid("1:10:0"), cli::UsageError);
    CHECK_THROWS_AS(cli::parse_log_grid("1:10"), cli::UsageError);
    const cli::Sweep s = cli::parse_sweep("kernel.b=0.25,0.5,0.75");
    CHECK(s.path == "kernel.b");
    CHECK(s.values == std::vector<double>{0.25, 0.5, 0.75});
    CHECK_THROWS_AS(cli::parse_sweep("kernel.b="), cli::UsageError);
    const ModelSpec m = io::model_from_json(Json::parse(kPam));
    CHECK_THROWS_AS(cli::apply_sweep(m, "kernel.nope", 1.0), cli::UsageError);
    CHECK(cli::apply_sweep(m, "drift.mass_lambda", -2.0).drift.lip_b == 1.0);
  }

  TEST_CASE("analyze writes the profile and verdicts") {
    const fs::path d = scratch("analyze");
    const fs::path model = write_model(d, kPam);
    CHECK(run_cli({"analyze", "--model", model.string(), "--out", d.string(), "--beta-grid", "0.1:10:5"}) == 0);
    const auto rows = read_csv(d / "potential_profile.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"beta", "upsilon", "err", "divergent"});
    const double A = amplitude_A(1, 2.0, 0.5);
    CHECK(std::stod(rows[3][1]) == rel(A * std::pow(1.0, -0.75)).epsilon(1e-4));
    CHECK(read_json(d / "verdicts.json").at("dalang").get<bool>());

    const fs::path d3 = scratch("analyze3");
    Json j = Json::parse(kPam);
    j["d"] = 3;
    const fs::path m3 = write_model(d3, j.dump());
    CHECK(run_cli({"analyze", "--model", m3.string(), "--out", d3.string()}) == 0);
    CHECK_FALSE(read_json(d3 / "verdicts.json").at("dalang").get<bool>());
    CHECK(run_cli({"analyze", "--model", model.string(), "--out", d.string(), "--beta-grid", "1:2:0"}) == 2);
  }

  TEST_CASE("bounds report") {
    const fs::path d = scratch("bounds");
    CHECK(run_cli({"bounds", "--model", write_model(d, kPam).string(), "--out", d.string(), "--p", "2,4"}) == 0);
    const Json j = read_json(d / "lyapunov.json");
    const Json& r2 = j.at("reports")[0];
    CHECK(r2.at("p").get<int>() == 2);
    CHECK(r2.at("lower2").at("value").get<double>() == rel(r2.at("upper").at("value").get<double>()).epsilon(1e-6));
    CHECK(r2.at("verdict").get<std::string>() == "WeaklyIntermittent");
    CHECK(j.at("pam").contains("lambda_upper_c"));

    const fs::path q = scratch("bounds_quiet");
    Json m = Json::parse(kPam);
    m["sigma"] = {{"constant", 0.0}};
    CHECK(run_cli({"bounds", "--model", write_model(q, m.dump()).string(), "--out", q.string()}) == 0);
    const Json zq = read_json(q / "lyapunov.json").at("reports")[0];
    CHECK(zq.at("verdict").get<std::string>() == "NotWeaklyIntermittent");
    CHECK(zq.at("upper").at("value").get<double>() == 0.0);
  }

  TEST_CASE("phase sweep over b") {
    const fs::path d = scratch("phase");
    const fs::path model = write_model(d, kPam);
    CHECK(run_cli({"phase", "--model", model.string(), "--out", d.string(), "--sweep", "kernel.b=0.25,0.5,0.75"}) == 0);
    const auto rows = read_csv(d / "phase.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"param", "lambda_lower_c", "lambda_upper_c", "verdict_at_lambda0"});
    for (int i = 1; i <= 3; ++i) {
      const double b = std::stod(rows[i][0]);
      CHECK(std::stod(rows[i][2]) == rel(pam_threshold_laplacian(b, 1.0)).epsilon(1e-10));
      CHECK(rows[i][1] == rows[i][2]);
    }
    const fs::path k = scratch("phase_kappa");
    CHECK(run_cli({"phase", "--model", model.string(), "--out", k.string(), "--sweep", "sigma.linear_kappa=0,2"}) == 0);
    const auto kr = read_csv(k / "phase.csv");
    CHECK(std::stod(kr[1][2]) == 0.0);
    const fs::path n = scratch("phase_nosol");
    CHECK(run_cli({"phase", "--model", model.string(), "--out", n.string(), "--sweep", "exponent.index=0.25"}) == 0);
    CHECK(read_csv(n / "phase.csv")[1][1] == "NoSolution");
  }

  TEST_CASE("regularity outputs") {
    const fs::path d = scratch("regularity");
    CHECK(run_cli({"regularity", "--model", write_model(d, kPam).string(), "--out", d.string(), "--r-grid", "1e-4:1e-1:4"}) == 0);
    const auto rows = read_csv(d / "gauge.csv");
    CHECK(rows.size() == 5);
    CHECK(read_json(d / "gauge.json").at("regime").get<std::string>() == "PolynomialGauge");
    const fs::path c = scratch("counter");
    CHECK(run_cli({"regularity", "--out", c.string(), "--sweep", "counterexample.q=0.5,1.5,2.5"}) == 0);
    const Json j = read_json(c / "gauge.json");
    CHECK(j[0].at("verdict").get<std::string>() == "NoRandomFieldSolution");
    CHECK(j[1].at("verdict").get<std::string>() == "SolutionDiscontinuousEverywhere");
    CHECK(j[2].at("verdict").get<std::string>() == "SolutionWithContinuousModification");
    for (const auto& r : j) CHECK(r.at("agree").get<bool>());
    CHECK(run_cli({"regularity", "--model", (d / "model.json").string(), "--out", d.string(), "--r-grid", "1:1:0"}) == 2);
  }

  TEST_CASE("simulate writes trajectories and summaries") {
    const fs::path d = scratch("simulate");
    const std::vector<std::string> args{"simulate", "--model", write_model(d, kPam).string(), "--out", d.string(),
                                        "--replicas", "6", "--grid", "32", "--period", "8", "--dt", "0.01",
                                        "--horizon", "0.5", "--seed", "3", "--p", "2,3"};
    CHECK(run_cli(args) == 0);
    CHECK(fs::exists(d / "trajectory_p2.csv"));
    const Json s = read_json(d / "summary_p3.json");
    CHECK(s.at("p").get<int>() == 3);
    const std::string first = io::read_file(d / "summary_p2.json");
    CHECK(run_cli(args) == 0);
    CHECK(io::read_file(d / "summary_p2.json") == first);
    CHECK(run_cli({"simulate", "--model", (d / "model.json").string(), "--out", d.string(), "--grid", "30"}) == 2);
  }

  TEST_CASE("usage errors exit with status 2") {
    CHECK(run_cli({"analyze"}) == 2);
    CHECK(run_cli({"frobnicate"}) == 2);
    const fs::path d = scratch("usage");
    Json m = Json::parse(kPam);
    m["kernel"]["bee"] = 1.0;
    CHECK(run_cli({"bounds", "--model", write_model(d, m.dump()).string(), "--out", d.string()}) == 2);
    const int status = std::system((std::string(SHEQ_CLI_PATH) + " analyze > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(status) == 2);
  }
}
