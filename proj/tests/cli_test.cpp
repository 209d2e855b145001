#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef CLI_BIN_PATH
#define CLI_BIN_PATH "./rkreduce"
#endif

namespace {

struct CmdResult {
  int exit_code;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  const std::string dir = "cli_test_tmp";
  const std::string out_file = dir + "/last_output.txt";
  if (std::system(("mkdir -p " + dir).c_str()) != 0) return {127, ""};
  const std::string cmd =
      std::string(CLI_BIN_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("cli: usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("simulate --preset fig9").exit_code == 2);
  CHECK(run_cli("dp --g-out 1 --delta 1.5").exit_code == 2);
  CHECK(run_cli("reduce --plan missing.json --in missing.csv").exit_code == 2);
}

TEST_CASE("cli: dp emits the transform JSON with the seed echoed") {
  const CmdResult r = run_cli("dp --g-out 0.4 --b 1 --delta 0.05 --seed 9");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  CHECK(j.at("seed") == 9);
  CHECK(j.at("delta") == 0.05);
  CHECK(j.at("sigma_sq").get<double>() == Catch::Approx(10.961277846683983));
  CHECK(j.at("accuracy_certificate").get<double>() ==
        Catch::Approx(3.6223832321140031));
  CHECK(j.contains("h"));
  // determinism: same seed, same output
  const CmdResult r2 = run_cli("dp --g-out 0.4 --b 1 --delta 0.05 --seed 9");
  CHECK(r2.output == r.output);
}

TEST_CASE("cli: reduce round-trips rows and echoes plan metadata") {
  REQUIRE(std::system("mkdir -p cli_test_tmp") == 0);
  write_file("cli_test_tmp/plan.json",
             R"({"family":"exp_to_logistic","epsilon":0.01,"params":{"sigma":2.0}})");

  SECTION("empty input produces a header-only body") {
    write_file("cli_test_tmp/empty.csv", "x\n");
    const CmdResult r = run_cli(
        "reduce --plan cli_test_tmp/plan.json --in cli_test_tmp/empty.csv "
        "--out cli_test_tmp/empty_out.csv --seed 5");
    REQUIRE(r.exit_code == 0);
    const std::string out = slurp("cli_test_tmp/empty_out.csv");
    CHECK(out.find("# plan: ") == 0);
    CHECK(out.find("x,y\n") != std::string::npos);
    CHECK(out.find("exp_to_logistic") != std::string::npos);
  }

  SECTION("ten rows stay ten rows, deterministically") {
    std::ostringstream in;
    in << "x\n";
    for (int i = 0; i < 10; ++i) in << (i * 0.25 - 1.0) << "\n";
    write_file("cli_test_tmp/ten.csv", in.str());
    const std::string cmd =
        "reduce --plan cli_test_tmp/plan.json --in cli_test_tmp/ten.csv "
        "--out cli_test_tmp/ten_out.csv --seed 5";
    REQUIRE(run_cli(cmd).exit_code == 0);
    const std::string first = slurp("cli_test_tmp/ten_out.csv");
    REQUIRE(run_cli(cmd).exit_code == 0);
    CHECK(slurp("cli_test_tmp/ten_out.csv") == first);
    int lines = 0;
    for (char c : first) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 12);  // comment + header + 10 rows
  }
}

TEST_CASE("cli: simulate fig1 quick run is deterministic with stable schema") {
  const std::string cmd =
      "simulate --preset fig1 --quick --seed 42 --threads 2 --out cli_test_tmp";
  REQUIRE(run_cli(cmd).exit_code == 0);
  const std::string sample = slurp("cli_test_tmp/fig1_theta0.csv");
  CHECK(sample.rfind("index,x,y,accepted,iterations\n", 0) == 0);
  const std::string summary_first = slurp("cli_test_tmp/fig1_summary.json");
  const nlohmann::json summary = nlohmann::json::parse(summary_first);
  REQUIRE(summary.at("per_theta").size() == 5);
  CHECK(summary.at("per_theta")[0].at("theta") == -5.0);
  CHECK(summary.at("per_theta")[0].at("tv").contains("estimate"));
  CHECK(summary.at("plan").at("family") == "laplace_to_gaussian");
  // determinism across a re-run, independent of thread count
  REQUIRE(run_cli("simulate --preset fig1 --quick --seed 42 --threads 3 "
                  "--out cli_test_tmp")
              .exit_code == 0);
  CHECK(slurp("cli_test_tmp/fig1_theta0.csv") == sample);
  CHECK(slurp("cli_test_tmp/fig1_summary.json") == summary_first);
}

TEST_CASE("cli: denoise preserves star rows in place") {
  write_file("cli_test_tmp/masked.csv", "value\n1.5\n★\n0.3\n*\n-0.7\n");
  const CmdResult r = run_cli(
      "denoise --in cli_test_tmp/masked.csv --out cli_test_tmp/masked_out.csv "
      "--target gaussian --sigma 3 --eps 0.01 --seed 8");
  REQUIRE(r.exit_code == 0);
  const std::string out = slurp("cli_test_tmp/masked_out.csv");
  std::vector<std::string> lines;
  std::stringstream ss(out);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "value");
  CHECK(lines[2] == "★");
  CHECK(lines[4] == "★");
  CHECK(lines[1] != "1.5");  // observed entries actually transformed
}

TEST_CASE("cli: moe keeps covariate columns") {
  write_file("cli_test_tmp/moe.csv",
             "x1,x2,y\n0.1,0.2,0.3\n-0.4,0.05,-0.2\n0.0,0.0,0.44\n");
  const CmdResult r = run_cli(
      "moe --in cli_test_tmp/moe.csv --out cli_test_tmp/moe_out.csv "
      "--delta 0.1 --seed 3");
  REQUIRE(r.exit_code == 0);
  const std::string out = slurp("cli_test_tmp/moe_out.csv");
  CHECK(out.rfind("x1,x2,y\n", 0) == 0);
  CHECK(out.find("0.1,0.2,") != std::string::npos);
  CHECK(out.find("-0.4,0.05,") != std::string::npos);
}

TEST_CASE("cli: corrupted M surfaces the hard error") {
  const CmdResult r = run_cli("validate --corrupt-m --seed 1");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("M violated") != std::string::npos);
}
