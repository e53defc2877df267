#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

// Integration tests driving the installed binary. CMake provides QSYNTH_CLI
// (binary path) and QSYNTH_FIXTURES (bundled plant files).

namespace {

using json = nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string cli() {
  const char* env = std::getenv("QSYNTH_CLI");
  REQUIRE(env != nullptr);
  return env;
}

std::string fixture(const std::string& name) {
  const char* env = std::getenv("QSYNTH_FIXTURES");
  REQUIRE(env != nullptr);
  return std::string(env) + "/" + name;
}

RunResult run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) res.out += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

}  // namespace

TEST_CASE("check passes on the cavity and fails on a detuned copy") {
  const RunResult ok = run("check " + fixture("cavity.json"));
  CHECK(ok.exit_code == 0);
  const json rep = json::parse(ok.out);
  CHECK(rep.at("version") == "qsynth-report/1");
  CHECK(rep.at("commutation").at("holds") == true);
  CHECK(rep.at("realizability").at("realizable") == true);

  // scale B0: commutation breaks, exit code 1, residual reported
  json doc = json::parse(std::ifstream(fixture("cavity.json")));
  for (auto& row : doc["matrices"]["B0"]) {
    for (auto& v : row) v = v.get<double>() * 1.1;
  }
  const std::string path = "/tmp/qsynth_cli_scaled.json";
  std::ofstream(path) << doc.dump();
  const RunResult bad = run("check " + path);
  CHECK(bad.exit_code == 1);
  const json brep = json::parse(bad.out);
  CHECK(brep.at("commutation").at("holds") == false);
  CHECK(brep.at("realizability").at("residual_A").get<double>() > 0.5);
  std::remove(path.c_str());
}

TEST_CASE("measured plant keeps commutation but is not an oscillator") {
  // the homodyne output discards a quadrature, so the padded output
  // condition must fail while the drift/noise condition stays exact
  const RunResult res = run("check " + fixture("cavity_measured.json"));
  CHECK(res.exit_code == 1);
  const json rep = json::parse(res.out);
  CHECK(rep["commutation"]["holds"] == true);
  CHECK(rep["realizability"]["realizable"] == false);
  CHECK(rep["realizability"]["residual_A"].get<double>() < 1e-9);
  CHECK(rep["realizability"]["residual_B"].get<double>() > 0.1);
}

TEST_CASE("QSYNTH_TOL loosens the residual checks") {
  json doc = json::parse(std::ifstream(fixture("cavity.json")));
  for (auto& row : doc["matrices"]["B0"]) {
    for (auto& v : row) v = v.get<double>() * 1.1;
  }
  const std::string path = "/tmp/qsynth_cli_tol.json";
  std::ofstream(path) << doc.dump();
  CHECK(run("check " + path).exit_code == 1);
  const std::string cmd = "QSYNTH_TOL=1.0 " + cli() + " check " + path + " >/dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  std::remove(path.c_str());
}

TEST_CASE("malformed input exits with code 2") {
  const std::string path = "/tmp/qsynth_cli_broken.json";
  std::ofstream(path) << "{ not json";
  CHECK(run("check " + path).exit_code == 2);
  std::remove(path.c_str());
  CHECK(run("check /nonexistent.json").exit_code == 2);
}

TEST_CASE("synthesize reproduces the cavity controller and a realization") {
  const RunResult res = run("synthesize " + fixture("cavity.json") +
                            " --g 0.1 --realize quantum --out /tmp/qsynth_cli_ctrl.json");
  CHECK(res.exit_code == 0);
  const json rep = json::parse(res.out);
  CHECK(rep.at("synthesis").at("status") == "success");
  CHECK(std::abs(rep["synthesis"]["controller"]["A_K"][0][0].get<double>() + 1.1) < 1e-3);
  CHECK(std::abs(rep["synthesis"]["controller"]["B_K"][0][0].get<double>() + 0.4472) < 1e-3);
  CHECK(rep["realization"]["conditions"]["realizable"] == true);
  CHECK(rep["realization"]["compatible"] == true);

  // determinism: a second run produces byte-identical output
  const RunResult again = run("synthesize " + fixture("cavity.json") +
                              " --g 0.1 --realize quantum --out /tmp/qsynth_cli_ctrl2.json");
  CHECK(res.out == again.out);

  // the emitted controller file drives the analyze subcommands
  const RunResult norm = run("analyze norm --plant " + fixture("cavity.json") +
                             " --controller /tmp/qsynth_cli_ctrl.json");
  CHECK(norm.exit_code == 0);
  CHECK(json::parse(norm.out).at("norm").get<double>() < 0.1);

  const RunResult sbr = run("analyze sbr --g 0.1 --plant " + fixture("cavity.json") +
                            " --controller /tmp/qsynth_cli_ctrl.json");
  CHECK(sbr.exit_code == 0);
  CHECK(json::parse(sbr.out).at("holds") == true);
  std::remove("/tmp/qsynth_cli_ctrl.json");
  std::remove("/tmp/qsynth_cli_ctrl2.json");
}

TEST_CASE("synthesize honors failure exit codes") {
  const RunResult res =
      run("synthesize " + fixture("cavity_uncertain.json") + " --g 0.002");
  CHECK(res.exit_code == 1);
  const json rep = json::parse(res.out);
  CHECK(rep.at("synthesis").at("status") == "g-too-small");
}

TEST_CASE("classical synthesis for the measured cavity") {
  const RunResult res = run("synthesize " + fixture("cavity_measured.json") +
                            " --g 0.134 --realize classical");
  CHECK(res.exit_code == 0);
  const json rep = json::parse(res.out);
  CHECK(std::abs(rep["synthesis"]["Y"][1][1].get<double>() - 0.121) < 1e-3);
  CHECK(std::abs(rep["synthesis"]["controller"]["A_K"][1][1].get<double>() + 1.3) < 1e-3);
  CHECK(rep["realization"]["conditions"]["realizable"] == true);
}

TEST_CASE("check accepts bare system files and augments degenerate ones") {
  // classical controller-shaped system: Theta = 0, cancelling noise block
  const double bk = -std::sqrt(0.2);
  json doc;
  doc["n"] = 2;
  doc["matrices"]["A"] = {{-1.1, 0.0}, {0.0, -1.1}};
  doc["matrices"]["B"] = {{0.0, 0.0, 0.0, bk, bk, 0.0}, {0.0, 0.0, bk, 0.0, 0.0, bk}};
  doc["matrices"]["C"] = {{std::sqrt(0.2), 0.0}, {0.0, std::sqrt(0.2)}};
  doc["matrices"]["D"] = {{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0, 0.0, 0.0}};
  doc["theta"] = {{"kind", "degenerate"}, {"nprime", 2}};
  doc["ito"] = {{"w", "canonical"}};
  doc["output_channel_offset"] = 0;
  const std::string path = "/tmp/qsynth_cli_system.json";
  std::ofstream(path) << doc.dump();
  const RunResult res = run("check " + path + " --augment");
  CHECK(res.exit_code == 0);
  const json rep = json::parse(res.out);
  CHECK(rep["realizability"]["realizable"] == true);
  REQUIRE(rep.contains("augmentation"));
  CHECK(rep["augmentation"]["system"]["n"] == 4);
  std::remove(path.c_str());
}

TEST_CASE("norm analysis accepts a bare system file") {
  json doc;
  doc["n"] = 1;
  doc["matrices"]["A"] = {{-1.0}};
  doc["matrices"]["B"] = {{1.0}};
  doc["matrices"]["C"] = {{2.0}};
  doc["matrices"]["D"] = {{0.0}};
  doc["theta"] = {{"kind", "degenerate"}, {"nprime", 1}};
  doc["ito"] = {{"w", json{{"S", {{1.0}}}, {"Tim", {{0.0}}}}}};
  const std::string path = "/tmp/qsynth_cli_lag.json";
  std::ofstream(path) << doc.dump();
  const RunResult res = run("analyze norm --system " + path);
  CHECK(res.exit_code == 0);
  CHECK(std::abs(json::parse(res.out).at("norm").get<double>() - 2.0) < 1e-6);
  std::remove(path.c_str());
}

TEST_CASE("g sweep reports a frontier consistent with the verdicts") {
  const RunResult res =
      run("synthesize " + fixture("cavity_uncertain.json") + " --g 0.1 --sweep-g");
  CHECK(res.exit_code == 0);
  const json rep = json::parse(res.out);
  REQUIRE(rep.contains("g_feasibility_frontier"));
  const double gmin = rep["g_feasibility_frontier"].get<double>();
  CHECK(gmin > 0.0);
  CHECK(gmin < 0.1);
}

TEST_CASE("robust analysis certifies the uncertain cavity") {
  const RunResult res =
      run("analyze robust --plant " + fixture("cavity_uncertain.json") + " --g 0.1 --grid 11");
  CHECK(res.exit_code == 0);
  const json rep = json::parse(res.out);
  CHECK(rep["robustness"]["certified"] == true);
  CHECK(rep["robustness"]["delta_grid"].size() == 11);
  for (const auto& g : rep["robustness"]["delta_grid"]) {
    CHECK(g.at("rightmost_eig").get<double>() < 0.0);
  }
}

TEST_CASE("simulate emits a csv trajectory") {
  run("synthesize " + fixture("cavity.json") +
      " --g 0.1 --realize quantum --out /tmp/qsynth_cli_sim_ctrl.json");
  const RunResult res = run("analyze simulate --plant " + fixture("cavity.json") +
                            " --controller /tmp/qsynth_cli_sim_ctrl.json --horizon 1 --dt 0.05");
  CHECK(res.exit_code == 0);
  std::istringstream is(res.out);
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("t,mean_0", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == 21);
  std::remove("/tmp/qsynth_cli_sim_ctrl.json");
}

namespace {

// Recursive comparison against a golden report: numbers within 1e-3,
// everything else exact. The input path is machine-specific and skipped.
void compare_reports(const json& got, const json& want, const std::string& where) {
  if (want.is_number() && got.is_number()) {
    const double w = want.get<double>();
    const double g = got.get<double>();
    INFO(where, ": ", g, " vs ", w);
    CHECK(std::abs(g - w) <= 1e-3 * (1.0 + std::abs(w)));
    return;
  }
  INFO(where);
  REQUIRE(got.type() == want.type());
  if (want.is_object()) {
    for (auto it = want.begin(); it != want.end(); ++it) {
      if (it.key() == "input") continue;
      REQUIRE(got.contains(it.key()));
      compare_reports(got.at(it.key()), it.value(), where + "." + it.key());
    }
  } else if (want.is_array()) {
    REQUIRE(got.size() == want.size());
    for (size_t k = 0; k < want.size(); ++k) {
      compare_reports(got[k], want[k], where + "[" + std::to_string(k) + "]");
    }
  } else {
    CHECK(got == want);
  }
}

}  // namespace

TEST_CASE("synthesis reports match the golden files") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"cavity.expected.json", "synthesize " + fixture("cavity.json") + " --g 0.1 --realize quantum"},
      {"cavity_uncertain.expected.json", "synthesize " + fixture("cavity_uncertain.json") + " --g 0.1"},
      {"cavity_measured.expected.json",
       "synthesize " + fixture("cavity_measured.json") + " --g 0.134 --realize classical"},
      {"amplifier_cavity.expected.json",
       "synthesize " + fixture("amplifier_cavity.json") + " --g 0.1 --realize mixed:2"},
  };
  for (const auto& [golden, cmd] : cases) {
    CAPTURE(golden);
    const RunResult res = run(cmd);
    REQUIRE(res.exit_code == 0);
    std::ifstream gf(fixture(golden));
    REQUIRE(gf.good());
    compare_reports(json::parse(res.out), json::parse(gf), golden);
  }
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("synthesize").exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);
}
