#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(MULTIZERO_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) {
  return std::string(MULTIZERO_DATA_DIR) + "/" + name;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("multiplicity text output leads with the headline numbers") {
  RunResult r = run_cli("multiplicity " + data("ex2.sys") + " --at 0,0");
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) == "multiplicity 3, hilbert 1,1,1, breadth 1, depth 2");
}

TEST_CASE("json output is deterministic and machine readable") {
  std::string args = "multiplicity " + data("ex2.sys") + " --at 0,0 --format json";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);

  json j = json::parse(a.out);
  CHECK(j["multiplicity"] == 3);
  CHECK(j["hilbert"] == json::array({1, 1, 1, 0}));
  CHECK(j["breadth"] == 1);
  CHECK(j["depth"] == 2);
  CHECK(j["terminated"] == true);
  CHECK(j["dual_basis"].size() == 3);
  CHECK(j["version"].is_string());
}

TEST_CASE("an order cap that cuts the chain short exits with code 2") {
  RunResult r = run_cli("multiplicity " + data("twelve_c.sys") +
                        " --at 0,0,0 --max-order 5 --format json");
  CHECK(r.exit_code == 2);
  json j = json::parse(r.out);
  CHECK(j["terminated"] == false);
}

TEST_CASE("usage problems exit with code 1 and name the trouble") {
  CHECK(run_cli("multiplicity /nonexistent.sys --at 0,0").exit_code == 1);
  CHECK(run_cli("multiplicity " + data("ex2.sys") + " --at 0,0 --format yaml")
            .exit_code == 1);
  RunResult r = run_cli("multiplicity " + data("ex2.sys") + " --at 0,0,0");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("error") != std::string::npos);
}

TEST_CASE("deflate reports one stage on the perturbed trig system") {
  RunResult r = run_cli("deflate " + data("trig3.sys") +
                        " --at 1.001,1.999,3.001 --format json");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["stages"] == 1);
  REQUIRE(j["zero"].size() == 3);
  CHECK(std::abs(j["zero"][0]["re"].get<double>() - 1.0) < 1e-10);
  CHECK(std::abs(j["zero"][1]["re"].get<double>() - 2.0) < 1e-10);
  CHECK(std::abs(j["zero"][2]["re"].get<double>() - 3.0) < 1e-10);
  CHECK(j["condition"].is_number());
  CHECK(j["error_estimate"].get<double>() < 5e-14);
  CHECK(j["functional_words"].size() == 2);
}

TEST_CASE("breadth1 walks the cosine chain from a data file") {
  RunResult r = run_cli("breadth1 " + data("mbc2.sys") +
                        " --at 0,3.141592653589793,1.772453850905516");
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) == "multiplicity 6, breadth 1, depth 5");
}

TEST_CASE("jet prints the truncated system as equations") {
  RunResult r = run_cli("jet " + data("intro.sys") + " --at 0,0 --order 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("vars x1 x2") != std::string::npos);
  CHECK(r.out.find("x1^3") != std::string::npos);
}

TEST_CASE("macaulay dumps land one csv per order") {
  char tmpl[] = "/tmp/mzdumpXXXXXX";
  REQUIRE(mkdtemp(tmpl) != nullptr);
  std::string dir(tmpl);

  RunResult r = run_cli("multiplicity " + data("ex2.sys") +
                        " --at 0,0 --dump-macaulay " + dir);
  REQUIRE(r.exit_code == 0);
  std::ifstream csv(dir + "/macaulay_2.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "row,d00,d10,d01,d20,d11,d02");
}

TEST_CASE("point files substitute for --at") {
  char tmpl[] = "/tmp/mzptXXXXXX";
  REQUIRE(mkdtemp(tmpl) != nullptr);
  std::string path = std::string(tmpl) + "/at.txt";
  {
    std::ofstream out(path);
    out << "# zero of the quadratic pair\n0\n0\n";
  }
  RunResult from_file = run_cli("multiplicity " + data("ex2.sys") +
                                " --at-file " + path + " --format json");
  RunResult inline_at =
      run_cli("multiplicity " + data("ex2.sys") + " --at 0,0 --format json");
  REQUIRE(from_file.exit_code == 0);
  CHECK(from_file.out == inline_at.out);
}

TEST_CASE("--output mirrors stdout into a file") {
  char tmpl[] = "/tmp/mzoutXXXXXX";
  REQUIRE(mkdtemp(tmpl) != nullptr);
  std::string path = std::string(tmpl) + "/report.json";

  RunResult direct = run_cli("multiplicity " + data("ex2.sys") +
                             " --at 0,0 --format json");
  RunResult filed = run_cli("multiplicity " + data("ex2.sys") +
                            " --at 0,0 --format json --output " + path);
  REQUIRE(filed.exit_code == 0);

  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == direct.out);
}

TEST_CASE("cluster search output carries zero records") {
  RunResult r = run_cli("cluster " + data("cluster8.sys") +
                        " --at 0,0 --radius 0.02 --n-starts 60 --format json");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["radius"] == 0.02);
  REQUIRE(j["zeros"].is_array());
  REQUIRE(!j["zeros"].empty());
  for (const auto& z : j["zeros"]) {
    CHECK(z["zero"].size() == 2);
    CHECK(z["residual"].get<double>() < 1e-8);
    CHECK(z["hits"].get<int>() >= 1);
  }
}
