#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stealthguard/cli.hpp"
#include "stealthguard/topology_io.hpp"

namespace stealthguard {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stealthguard_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    unsetenv("STEALTHGUARD_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("STEALTHGUARD_SEED");
  }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // x1 -> x2 -> x3 with a single sensor on x3.
  std::string chain() {
    return write("chain.txt", "3 1 2\nedge x1 x1\nedge x2 x2\nedge x3 x3\nedge x1 x2\nedge x2 x3\nsensor y1 x3\n");
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(run({"--help"}).code, kExitSuccess);
  EXPECT_EQ(run({"certify", "--help"}).code, kExitSuccess);
}

TEST_F(CliTest, UnknownCommandIsInvalid) {
  EXPECT_EQ(run({}).code, kExitInvalid);
  EXPECT_EQ(run({"frobnicate"}).code, kExitInvalid);
  EXPECT_EQ(run({"synthesize", "--n", "three", "--p", "1"}).code, kExitInvalid);
}

TEST_F(CliTest, AnalyzeReportsLinking) {
  const auto file = chain();
  const auto bad = run({"analyze", "--topology", file, "--attack", "x1,x2"});
  EXPECT_EQ(bad.code, kExitNegative);
  EXPECT_NE(bad.out.find("linking size: 1 of 2"), std::string::npos);
  EXPECT_NE(bad.out.find("structurally left invertible: no"), std::string::npos);
  const auto good = run({"analyze", "--topology", file, "--attack", "x1"});
  EXPECT_EQ(good.code, kExitSuccess);
  EXPECT_NE(good.out.find("structurally left invertible: yes"), std::string::npos);
}

TEST_F(CliTest, AnalyzeEmptySetIsVacuous) {
  const auto r = run({"analyze", "--topology", chain()});
  EXPECT_EQ(r.code, kExitSuccess);
  EXPECT_NE(r.out.find("warning: empty attack set"), std::string::npos);
}

TEST_F(CliTest, AnalyzeSynthesizedTopologyForEveryFeasibleSet) {
  const auto file = path("t.txt");
  ASSERT_EQ(run({"synthesize", "--n", "4", "--m", "2", "--p", "2", "--out", file}).code, kExitSuccess);
  for (const char* f : {"x1", "x3,x4", "y1,x2", "y1,y2", "x4,y2"})
    EXPECT_EQ(run({"analyze", "--topology", file, "--attack", f}).code, kExitSuccess) << f;
  EXPECT_EQ(run({"analyze", "--topology", file, "--attack", "x1,x2,x3"}).code, kExitNegative);
}

TEST_F(CliTest, AnalyzeRejectsUnknownNode) {
  const auto r = run({"analyze", "--topology", chain(), "--attack", "x9"});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, MalformedFileReportsLine) {
  const auto file = write("bad.txt", "2 0 0\nedge x1 x1\nedge x2 x3\n");
  const auto r = run({"certify", "--topology", file});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_EQ(run({"certify", "--topology", path("missing.txt")}).code, kExitInvalid);
}

TEST_F(CliTest, SynthesizeThenCertify) {
  const auto out = path("t.txt");
  const auto r = run({"synthesize", "--n", "4", "--m", "2", "--p", "2", "--out", out});
  EXPECT_EQ(r.code, kExitSuccess);
  EXPECT_NE(r.out.find("links: 10"), std::string::npos);
  EXPECT_NE(r.out.find("certified: yes"), std::string::npos);
  EXPECT_EQ(read_topology_file(out).topology.link_count(), 10U);

  const auto cert = run({"certify", "--topology", out, "--json"});
  EXPECT_EQ(cert.code, kExitSuccess);
  const auto j = nlohmann::json::parse(cert.out);
  EXPECT_EQ(j.at("robust"), true);
  EXPECT_EQ(j.at("p"), 2);
}

TEST_F(CliTest, SynthesizeInfeasibleIsInvalid) {
  const auto r = run({"synthesize", "--n", "4", "--m", "1", "--p", "2"});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos);
}

TEST_F(CliTest, PlatoonCertifiesPerClass) {
  const auto out = path("platoon.txt");
  const auto r = run({"platoon", "--n", "6", "--m", "2", "--p", "2", "--class", "x", "--out", out});
  EXPECT_EQ(r.code, kExitSuccess);
  EXPECT_NE(r.out.find("links: 14"), std::string::npos);
  const auto x = run({"certify", "--topology", out, "--class", "x"});
  EXPECT_EQ(x.code, kExitSuccess);
  EXPECT_NE(x.out.find("robust: yes"), std::string::npos);
  const auto xy = run({"certify", "--topology", out, "--class", "xy"});
  EXPECT_EQ(xy.code, kExitNegative);
  EXPECT_NE(xy.out.find("counterexample"), std::string::npos);
}

TEST_F(CliTest, SensorsPicksCheapestCount) {
  const auto cheap_sensors = run({"sensors", "--n", "5", "--p", "2", "--k1", "1", "--k2", "2"});
  EXPECT_EQ(cheap_sensors.code, kExitSuccess);
  EXPECT_NE(cheap_sensors.out.find("m*=2"), std::string::npos);
  EXPECT_NE(cheap_sensors.out.find("cost: 17"), std::string::npos);
  const auto cheap_links = run({"sensors", "--n", "5", "--p", "2", "--k1", "2", "--k2", "1"});
  EXPECT_NE(cheap_links.out.find("m*=5"), std::string::npos);
  EXPECT_NE(cheap_links.out.find("cost: 25"), std::string::npos);
}

TEST_F(CliTest, AttackFoundBehindSingleSensor) {
  const auto trace = path("trace.csv");
  const auto r = run({"attack", "--topology", chain(), "--attack", "x1,x2", "--out", trace, "--json"});
  EXPECT_EQ(r.code, kExitSuccess);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("perfect_attack_found"), true);
  EXPECT_LE(j.at("max_abs_delta_z").get<double>(), 1e-8);
  EXPECT_GE(j.at("max_abs_delta_x").get<double>(), 1e-3);
  EXPECT_EQ(j.at("alarm_sequences_identical"), true);
  EXPECT_TRUE(fs::exists(trace));
}

TEST_F(CliTest, AttackNoneWhenInvertible) {
  const auto r = run({"attack", "--topology", chain(), "--attack", "x1"});
  EXPECT_EQ(r.code, kExitNegative);
  EXPECT_NE(r.out.find("perfect attack: none"), std::string::npos);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::vector<std::string> args = {"simulate", "--topology", chain(), "--attack", "x1",
                                         "--horizon", "50"};
  auto with_out = [&](const std::string& csv) {
    auto a = args;
    a.push_back("--out");
    a.push_back(csv);
    return run(a);
  };
  const auto a = with_out(path("a.csv"));
  const auto b = with_out(path("b.csv"));
  EXPECT_EQ(a.code, kExitSuccess);
  EXPECT_EQ(a.out, b.out);
  std::ifstream fa(path("a.csv")), fb(path("b.csv"));
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_FALSE(sa.str().empty());
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(a.out.find("seed: " + std::to_string(kDefaultSeed)), std::string::npos);
}

TEST_F(CliTest, SeedFromEnvironment) {
  const std::vector<std::string> args = {"simulate", "--topology", chain(), "--attack", "x1",
                                         "--horizon", "30", "--json"};
  setenv("STEALTHGUARD_SEED", "1234", 1);
  const auto env = run(args);
  EXPECT_EQ(nlohmann::json::parse(env.out).at("seed"), 1234);
  auto explicit_args = args;
  explicit_args.insert(explicit_args.end(), {"--seed", "99"});
  EXPECT_EQ(nlohmann::json::parse(run(explicit_args).out).at("seed"), 99);
  setenv("STEALTHGUARD_SEED", "abc", 1);
  EXPECT_EQ(run(args).code, kExitInvalid);
}

TEST_F(CliTest, RealizationRoundTripReproducesRun) {
  const auto saved = path("real.txt");
  const std::vector<std::string> base = {"attack", "--topology", chain(), "--attack", "x1,x2", "--json"};
  auto first = base;
  first.insert(first.end(), {"--realization-out", saved});
  auto second = base;
  second.insert(second.end(), {"--realization-in", saved});
  const auto a = run(first);
  const auto b = run(second);
  EXPECT_EQ(a.code, kExitSuccess);
  EXPECT_EQ(a.out, b.out);
}

}  // namespace
}  // namespace stealthguard
