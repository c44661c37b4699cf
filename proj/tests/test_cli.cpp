#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpmd/instance.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = MPMD_CLI_PATH;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("mpmd_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + kCli + "\" " + args +
                          " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen: uniform family writes a valid 10-request instance") {
  Scratch s;
  const std::string out = s.path("u.json");
  REQUIRE(run_cli("gen --family uniform --pairs 5 --seed 1 --out \"" + out + "\"") == 0);
  const mpmd::Instance inst = mpmd::load_instance(out);
  CHECK(inst.request_count() == 10);
  CHECK(inst.meta.family == "uniform");
}

TEST_CASE("gen: simultaneous family pins all times") {
  Scratch s;
  const std::string out = s.path("sim.json");
  REQUIRE(run_cli("gen --family simultaneous --pairs 3 --seed 2 --t0 4.5 --out \"" + out +
                  "\"") == 0);
  const mpmd::Instance inst = mpmd::load_instance(out);
  for (const mpmd::Request& r : inst.requests) CHECK(r.atime == 4.5);
}

TEST_CASE("gen: adversarial-line level 3 has 16 requests") {
  Scratch s;
  const std::string out = s.path("adv.json");
  REQUIRE(run_cli("gen --family adversarial-line --level 3 --out \"" + out + "\"") == 0);
  CHECK(mpmd::load_instance(out).request_count() == 16);
}

TEST_CASE("gen: parameter errors exit with 2") {
  Scratch s;
  CHECK(run_cli("gen --family uniform --pairs 0 --out \"" + s.path("x.json") + "\"") == 2);
  CHECK(run_cli("gen --family nosuch --out \"" + s.path("x.json") + "\"") == 2);
  CHECK(run_cli("gen --family uniform") == 2);  // missing --out
}

TEST_CASE("run: summary and trace, byte-identical on rerun") {
  Scratch s;
  const std::string inst = s.path("pair.json");
  mpmd::save_instance(mpmd::generate_simultaneous({0.0, 7.0}, 0.0), inst);

  const std::string trace = s.path("trace.csv");
  const std::string summary = s.path("summary.json");
  REQUIRE(run_cli("run --instance \"" + inst + "\" --trace-out \"" + trace + "\" --out \"" +
                  summary + "\"") == 0);
  const std::string trace1 = slurp(trace);
  const std::string summary1 = slurp(summary);

  // alg_total = 3d at the defaults.
  const auto parsed = nlohmann::json::parse(summary1);
  CHECK(parsed["alg_total"].get<double>() == Catch::Approx(21.0));
  CHECK(parsed["m"].get<int>() == 1);
  CHECK(trace1.rfind("seq,i,j,", 0) == 0);

  REQUIRE(run_cli("run --instance \"" + inst + "\" --trace-out \"" + trace + "\" --out \"" +
                  summary + "\"") == 0);
  CHECK(slurp(trace) == trace1);
  CHECK(slurp(summary) == summary1);
}

TEST_CASE("run: --with-bound reports exact optimum in cap, labeled greedy bound above") {
  Scratch s;
  const std::string small = s.path("small.json");
  mpmd::save_instance(mpmd::generate_simultaneous({0.0, 1.0, 100.0, 101.0}, 0.0), small);
  const std::string out = s.path("sum.json");
  REQUIRE(run_cli("run --instance \"" + small + "\" --with-bound --out \"" + out + "\"") == 0);
  auto parsed = nlohmann::json::parse(slurp(out));
  CHECK(parsed["offline_bound"]["kind"] == "exact-dp");
  CHECK(parsed["offline_bound"]["optimal"].get<bool>());
  CHECK(parsed["offline_bound"]["value"].get<double>() == Catch::Approx(2.0));

  const std::string big = s.path("big.json");
  mpmd::save_instance(mpmd::generate_uniform(15, mpmd::MetricKind::Euclidean, 10.0, 5.0, 3),
                      big);
  REQUIRE(run_cli("run --instance \"" + big + "\" --with-bound --out \"" + out + "\"") == 0);
  parsed = nlohmann::json::parse(slurp(out));
  CHECK(parsed["offline_bound"]["kind"] == "greedy-upper-bound");
  CHECK_FALSE(parsed["offline_bound"]["optimal"].get<bool>());
  CHECK(parsed["offline_bound"]["value"].get<double>() > 0.0);
}

TEST_CASE("run: missing instance file exits with 2") {
  CHECK(run_cli("run --instance /nonexistent/nope.json") == 2);
}

TEST_CASE("run: invalid parameters exit with 2") {
  Scratch s;
  const std::string inst = s.path("pair.json");
  mpmd::save_instance(mpmd::generate_simultaneous({0.0, 1.0}, 0.0), inst);
  CHECK(run_cli("run --instance \"" + inst + "\" --alpha 0") == 2);
  CHECK(run_cli("run --instance \"" + inst + "\" --beta 1") == 2);
  CHECK(run_cli("run --instance \"" + inst + "\" --tie-break sideways") == 2);
}

TEST_CASE("analyze: report with zero violations, ratio >= 1") {
  Scratch s;
  const std::string inst = s.path("inst.json");
  mpmd::save_instance(mpmd::generate_uniform(5, mpmd::MetricKind::Euclidean, 50.0, 20.0, 9),
                      inst);
  const std::string report = s.path("report.json");
  REQUIRE(run_cli("analyze --instance \"" + inst + "\" --out \"" + report + "\"") == 0);
  const auto parsed = nlohmann::json::parse(slurp(report));
  CHECK(parsed["ok"].get<bool>());
  CHECK(parsed["totals"]["ratio"].get<double>() >= 1.0 - 1e-9);
  for (const auto& check : parsed["checks"]) CHECK(check["violations"].get<long>() == 0);
}

TEST_CASE("analyze: above the DP cap without a line fallback exits with 3") {
  Scratch s;
  const std::string inst = s.path("big.json");
  mpmd::save_instance(mpmd::generate_uniform(14, mpmd::MetricKind::Euclidean, 10.0, 5.0, 4),
                      inst);
  CHECK(run_cli("analyze --instance \"" + inst + "\"") == 3);

  // Large simultaneous line instances fall back to the line solver.
  const std::string line = s.path("line.json");
  mpmd::save_instance(mpmd::generate_greedy_adversarial_line(5), line);
  CHECK(run_cli("analyze --instance \"" + line + "\" --out \"" + s.path("r.json") + "\"") == 0);
}

TEST_CASE("analyze: MPMD_DP_CAP env var overrides the cap") {
  Scratch s;
  const std::string inst = s.path("mid.json");
  mpmd::save_instance(mpmd::generate_uniform(6, mpmd::MetricKind::Line, 10.0, 5.0, 4), inst);
  CHECK(run_cli("analyze --instance \"" + inst + "\"") == 0);
  CHECK(run_cli("analyze --instance \"" + inst + "\"", "MPMD_DP_CAP=10") == 3);
  CHECK(run_cli("analyze --instance \"" + inst + "\"", "MPMD_DP_CAP=bogus") == 2);
}

TEST_CASE("sweep: adversarial levels give a nondecreasing ratio column") {
  Scratch s;
  const std::string out = s.path("sweep.csv");
  REQUIRE(run_cli("sweep --family adversarial-line --sizes 1,2,3,4 --seeds 0 --out \"" + out +
                  "\"") == 0);
  std::istringstream in(slurp(out));
  std::string header;
  std::getline(in, header);
  CHECK(header == "m,seed,alg,opt,ratio");
  double prev = 0.0;
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    const auto last_comma = line.rfind(',');
    const double ratio = std::stod(line.substr(last_comma + 1));
    CHECK(ratio >= prev);
    prev = ratio;
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("sweep: empty size list writes a header-only CSV") {
  Scratch s;
  const std::string out = s.path("empty.csv");
  REQUIRE(run_cli("sweep --family uniform --seeds 1 --out \"" + out + "\"") == 0);
  CHECK(slurp(out) == "m,seed,alg,opt,ratio\n");
}

TEST_CASE("run/analyze: matching JSON outputs") {
  Scratch s;
  const std::string inst = s.path("inst.json");
  mpmd::save_instance(mpmd::generate_simultaneous({0.0, 1.0, 100.0, 101.0}, 0.0), inst);

  const std::string alg_out = s.path("alg.json");
  REQUIRE(run_cli("run --instance \"" + inst + "\" --matching-out \"" + alg_out + "\"") == 0);
  auto alg = nlohmann::json::parse(slurp(alg_out));
  CHECK(alg["edges"].size() == 2);
  CHECK(alg["total"].get<double>() == Catch::Approx(6.0));

  const std::string opt_out = s.path("opt.json");
  REQUIRE(run_cli("analyze --instance \"" + inst + "\" --opt-out \"" + opt_out + "\" --out \"" +
                  s.path("rep.json") + "\"") == 0);
  auto opt = nlohmann::json::parse(slurp(opt_out));
  CHECK(opt["total"].get<double>() == Catch::Approx(2.0));
}

TEST_CASE("sweep: parallel jobs produce the same bytes as sequential") {
  Scratch s;
  const std::string seq = s.path("seq.csv");
  const std::string par = s.path("par.csv");
  const std::string args = "sweep --family uniform --sizes 2,3,4 --seeds 1,2 --horizon 10 ";
  REQUIRE(run_cli(args + "--out \"" + seq + "\"") == 0);
  REQUIRE(run_cli(args + "--jobs 4 --out \"" + par + "\"") == 0);
  CHECK(slurp(seq) == slurp(par));
}
