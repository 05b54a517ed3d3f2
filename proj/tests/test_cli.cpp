#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "line_server.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded and returns its exit status and stdout.
Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " PATHGAUGE_CLI " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "pathgauge_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kData = PATHGAUGE_DATA_DIR;

}  // namespace

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("simulate --no-such-flag").code, 1);
}

TEST(Cli, SimulateIsByteIdenticalAcrossRuns) {
  const std::string args = "simulate --trials 2000 --n-values 5,10,50 --seed 9";
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("n,eta_percent,skipped\n", 0), 0u);
  EXPECT_EQ(run(args + " -j 1").out, a.out);
  EXPECT_NE(run("simulate --trials 2000 --n-values 5,10,50 --seed 10").out, a.out);
}

TEST(Cli, SeedFromEnvironmentAndFlagPrecedence) {
  const std::string args = "simulate --trials 1000 --n-values 5";
  auto env = run(args, "PATHGAUGE_SEED=9");
  EXPECT_EQ(env.out, run(args + " --seed 9").out);
  EXPECT_EQ(run(args + " --seed 9", "PATHGAUGE_SEED=1").out, env.out);
  EXPECT_EQ(run(args, "PATHGAUGE_SEED=notanumber").code, 1);
}

TEST(Cli, InvalidSimulationConfigExitsOne) {
  EXPECT_EQ(run("simulate --trials 0").code, 1);
  EXPECT_EQ(run("simulate --lambda -5").code, 1);
  EXPECT_EQ(run("simulate --preset nope").code, 1);
}

TEST(Cli, SimulateWritesRunDirectory) {
  auto dir = scratch("sim");
  auto r = run("simulate --preset ipv6-table4 --trials 2000 -o " + dir.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "eta.csv"));
  EXPECT_TRUE(fs::exists(dir / "eta_corrected.csv"));
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["command"], "simulate");
  EXPECT_FALSE(manifest["run_id"].get<std::string>().empty());
  auto report = nlohmann::json::parse(slurp(dir / "simulate.json"));
  EXPECT_EQ(report["manifest"]["run_id"], manifest["run_id"]);
  EXPECT_EQ(run("report --check " + dir.string()).code, 0);

  // Tampering with an output is detected.
  std::ofstream(dir / "eta.csv", std::ios::app) << "999,1\n";
  EXPECT_NE(run("report --check " + dir.string()).code, 0);
}

TEST(Cli, CalibrateExitCodes) {
  auto ok = run("calibrate -t " + kData + "/table3_eta_ipv4.csv --target 10 --correction 1.53");
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("100,9.08"), std::string::npos);
  EXPECT_EQ(run("calibrate -t " + kData + "/table4_eta_ipv6.csv --target 1").code, 3);
  EXPECT_EQ(run("calibrate -t " + kData + "/table1_sd_tt01_tt146.csv --target 10").code, 2);
  EXPECT_EQ(run("calibrate -t /nonexistent.csv --target 10").code, 2);
  // One measured factor pair is enough; a lone half of a pair is not.
  EXPECT_EQ(run("calibrate -t " + kData + "/table3_eta_ipv4.csv --lambda-exp 2000 --lambda-t 1000 --target 5").code, 0);
  EXPECT_EQ(run("calibrate -t " + kData + "/table3_eta_ipv4.csv --lambda-exp 2000 --target 5").code, 1);
}

TEST(Cli, EstimateEndToEnd) {
  auto dir = scratch("est");
  const auto fwd = dir / "fwd.records", rev = dir / "rev.records";
  ASSERT_EQ(run("simulate --trials 10 --n-values 5 --lambda 1000 --records-out " + fwd.string() +
                " --pairs 2400 --label tt01-\\>tt146 --seed 1")
                .code,
            0);
  ASSERT_EQ(run("simulate --trials 10 --n-values 5 --lambda 6000 --records-out " + rev.string() +
                " --pairs 2400 --label tt146-\\>tt01 --seed 2")
                .code,
            0);
  auto out = dir / "run";
  auto r = run("estimate -r " + fwd.string() + " -r " + rev.string() + " -w 10 --clock-precision 1e-6 -o " +
               out.string());
  ASSERT_EQ(r.code, 0);
  auto report = nlohmann::json::parse(slurp(out / "estimate.json"));
  ASSERT_TRUE(report.contains("asymmetry"));
  EXPECT_TRUE(report["asymmetry"]["asymmetric"].get<bool>());
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_EQ(run("report --check " + out.string()).code, 0);

  // Without --out the report lands on stdout.
  auto stdout_run = run("estimate -r " + fwd.string());
  ASSERT_EQ(stdout_run.code, 0);
  auto j = nlohmann::json::parse(stdout_run.out);
  EXPECT_FALSE(j.empty());
}

TEST(Cli, EstimateInsufficientDataExitsTwo) {
  auto dir = scratch("short");
  const auto fwd = dir / "short.records";
  ASSERT_EQ(run("simulate --trials 10 --n-values 5 --records-out " + fwd.string() + " --pairs 150").code,
            0);
  EXPECT_EQ(run("estimate -r " + fwd.string()).code, 2);
  EXPECT_EQ(run("estimate -r " + fwd.string() + " --n-grid 5,10,50").code, 0);
  EXPECT_EQ(run("estimate -r /nonexistent.records").code, 2);
}

TEST(Cli, FetchFromFileAndRefusedTcp) {
  auto dir = scratch("fetch");
  const auto fwd = dir / "fwd.records";
  ASSERT_EQ(run("simulate --trials 10 --n-values 5 --records-out " + fwd.string() + " --pairs 10").code, 0);
  auto out = dir / "run";
  EXPECT_EQ(run("fetch -s a-\\>b=" + fwd.string() + " -o " + out.string()).code, 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));

  const auto port = pathgauge::testutil::LineServer::closed_port();
  auto out2 = dir / "run2";
  auto partial = run("fetch -s a-\\>b=" + fwd.string() + " -s b-\\>a=tcp://127.0.0.1:" +
                     std::to_string(port) + " -o " + out2.string());
  EXPECT_NE(partial.code, 0);
}

TEST(Cli, FetchFromTcpCollector) {
  pathgauge::testutil::LineServer server({"1 100 10.0 0.010", "2 1100 40.0 0.0112"});
  auto out = scratch("tcp");
  auto r = run("fetch -s x-\\>y=tcp://127.0.0.1:" + std::to_string(server.port()) + " -o " + out.string());
  EXPECT_EQ(r.code, 0);
  bool found = false;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().extension() == ".records") {
      found = true;
      EXPECT_NE(slurp(e.path()).find("2 1100 40.000000 0.0112"), std::string::npos);
    }
  EXPECT_TRUE(found);
}
