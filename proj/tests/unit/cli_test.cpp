#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "coex/experiments.hpp"

namespace coex {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("coexsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "coexsim");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    ::testing::internal::CaptureStdout();
    ::testing::internal::CaptureStderr();
    const int rc = run_cli(static_cast<int>(argv.size()), argv.data());
    out_ = ::testing::internal::GetCapturedStdout();
    err_ = ::testing::internal::GetCapturedStderr();
    return rc;
  }

  fs::path dir_;
  std::string out_;
  std::string err_;
};

constexpr const char* kOrla = R"(scenario.id = orla5
stations.count = 5
lbt.mode = orla
sim.duration_s = 10
sim.warmup_s = 1
sim.seed = 4
)";

TEST_F(CliTest, AnalyzeSingleStation) {
  const auto sc = file("one.scenario", "stations.count = 1\n");
  ASSERT_EQ(run({"analyze", "--scenario", sc, "--out", path("a.csv")}), 0) << err_;
  const auto csv = slurp(path("a.csv"));
  EXPECT_EQ(csv, out_);
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header.substr(0, 24), "scenario_id,station,tau,");
  // tau = 2/17
  EXPECT_NE(row.find(",0.11764705882352941,"), std::string::npos) << row;
}

TEST_F(CliTest, MalformedFileExitsTwoWithoutOutput) {
  const auto sc = file("bad.scenario", "stations.count = five\n");
  EXPECT_EQ(run({"analyze", "--scenario", sc, "--out", path("a.csv")}), 2);
  EXPECT_NE(err_.find("stations.count"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("a.csv")));
  EXPECT_EQ(run({"simulate", "--scenario", sc, "--out", path("s.csv")}), 2);
  EXPECT_FALSE(fs::exists(path("s.csv")));
  EXPECT_EQ(run({"simulate", "--scenario", path("missing")}), 2);
  EXPECT_EQ(run({"simulate"}), 2);
}

TEST_F(CliTest, ModelFailureExitsThree) {
  // A slot longer than the whole frame exchange leaves the fairness bound undefined.
  const auto sc = file("deg.scenario", "stations.count = 2\nphy.slot_sigma_us = 5000\n");
  EXPECT_EQ(run({"analyze", "--scenario", sc, "--out", path("a.csv")}), 3);
  EXPECT_NE(err_.find("solver failure"), std::string::npos) << err_;
  EXPECT_FALSE(fs::exists(path("a.csv")));
}

TEST_F(CliTest, SimulateRowsAndDeterminism) {
  const auto sc = file("o.scenario", kOrla);
  ASSERT_EQ(run({"simulate", "--scenario", sc, "--out", path("r1.csv")}), 0) << err_;
  ASSERT_EQ(run({"simulate", "--scenario", sc, "--out", path("r2.csv")}), 0);
  const auto csv = slurp(path("r1.csv"));
  EXPECT_EQ(csv, slurp(path("r2.csv")));
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, kNodeCsvHeader);
  int rows = 0;
  std::string last;
  while (std::getline(lines, line)) {
    ++rows;
    last = line;
    EXPECT_EQ(line.find("nan"), std::string::npos);
  }
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(last.rfind("orla5,4,lbt,orla,", 0), 0u) << last;

  ASSERT_EQ(run({"simulate", "--scenario", sc, "--seed", "9"}), 0);
  EXPECT_NE(out_.find("orla5,9,0,wifi,"), std::string::npos);
}

TEST_F(CliTest, NoneModeHasNoLbtRowAndEmptyGain) {
  const auto sc = file("n.scenario", "stations.count = 2\nsim.duration_s = 0.5\nsim.warmup_s = 0.1\n");
  ASSERT_EQ(run({"simulate", "--scenario", sc}), 0);
  EXPECT_EQ(out_.find("lbt"), std::string::npos);
  EXPECT_NE(out_.find(",,,"), std::string::npos);
  EXPECT_EQ(out_.back(), '\n');
}

TEST_F(CliTest, DegenerateSweepMatchesSimulate) {
  const auto sc = file("o.scenario", kOrla);
  const auto sw = file("o.sweep", std::string(kOrla) + "sweep.axis1.path = sim.seed\nsweep.axis1.values = 4\n");
  ASSERT_EQ(run({"simulate", "--scenario", sc}), 0);
  const std::string single = out_;
  ASSERT_EQ(run({"sweep", "--sweep", sw, "--jobs", "2"}), 0) << err_;
  std::string swept = out_;
  // Only the scenario_id suffix naming the cell differs.
  const std::string suffix = "@sim.seed=4";
  for (auto pos = swept.find(suffix); pos != std::string::npos; pos = swept.find(suffix)) {
    swept.erase(pos, suffix.size());
  }
  EXPECT_EQ(swept, single);
}

TEST_F(CliTest, SweepOrderIndependentOfJobs) {
  const auto sw = file("g.sweep", std::string(kOrla) +
                                      "sweep.axis1.path = stations.count\nsweep.axis1.values = 2,4\n"
                                      "sweep.axis2.path = stations.*.f_agg\nsweep.axis2.values = 1,2\n"
                                      "sweep.repetitions = 3\n");
  ASSERT_EQ(run({"sweep", "--sweep", sw, "--jobs", "1", "--out", path("a.csv"), "--emit-plot"}), 0) << err_;
  ASSERT_EQ(run({"sweep", "--sweep", sw, "--jobs", "7", "--out", path("b.csv")}), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  const auto gp = slurp(path("a.csv.gp"));
  EXPECT_NE(gp.find(path("a.csv")), std::string::npos);
  EXPECT_NE(gp.find("stations.*.f_agg=2"), std::string::npos);
  EXPECT_EQ(run({"sweep", "--sweep", sw, "--emit-plot"}), 2);
}

TEST_F(CliTest, CompareVerdicts) {
  const auto orla = file("o.scenario", kOrla);
  ASSERT_EQ(run({"compare", "--scenario", orla, "--out", path("c.csv")}), 0) << err_;
  EXPECT_NE(out_.find("fairness            PASS"), std::string::npos) << out_;
  EXPECT_NE(slurp(path("c.csv")).find(",PASS\n"), std::string::npos);

  const auto laa = file("l.scenario", "stations.count = 5\nlbt.mode = laa\nlbt.t_lbt_us = 10000\n"
                                      "sim.duration_s = 3\nsim.warmup_s = 0.5\n");
  ASSERT_EQ(run({"compare", "--scenario", laa}), 0);
  EXPECT_NE(out_.find("fairness            FAIL"), std::string::npos) << out_;

  const auto none = file("n.scenario", "stations.count = 5\n");
  EXPECT_EQ(run({"compare", "--scenario", none}), 2);
  EXPECT_NE(err_.find("nothing to compare"), std::string::npos) << err_;
}

}  // namespace
}  // namespace coex
