#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cob/cli.hpp"
#include "cob/io.hpp"
#include "cob/presets.hpp"

namespace cob {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("cob_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  std::string at(const std::string& rel) const { return (root_ / rel).string(); }

  fs::path root_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST_F(CliTest, SimulateWritesFiveFiles) {
  const auto r = cli({"simulate", "--preset", "balanced", "--seed", "7", "--out", at("b7"), "horizon.seconds=60"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto name : {files::kEvents, files::kTrades, files::kSeries, files::kProfiles, files::kManifest}) {
    EXPECT_TRUE(fs::exists(root_ / "b7" / name)) << name;
  }
  EXPECT_NE(slurp(root_ / "b7" / files::kManifest).find("seed = 7"), std::string::npos);
}

TEST_F(CliTest, SimulateTwiceIsByteIdentical) {
  ASSERT_EQ(cli({"simulate", "--preset", "balanced", "--seed", "7", "--out", at("a"), "--set", "horizon.seconds=60"}).code, 0);
  ASSERT_EQ(cli({"simulate", "--preset", "balanced", "--seed", "7", "--out", at("b"), "--set", "horizon.seconds=60"}).code, 0);
  EXPECT_EQ(slurp(root_ / "a" / files::kEvents), slurp(root_ / "b" / files::kEvents));
}

TEST_F(CliTest, MissingConfigExitsTwo) {
  const auto r = cli({"simulate", "--config", at("missing.cfg")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing.cfg"), std::string::npos);
}

TEST_F(CliTest, BadConfigLineReported) {
  fs::create_directories(root_);
  std::ofstream(root_ / "bad.cfg") << "rates.limit_bid = 5\nrates.limit_ask = x\n";
  const auto r = cli({"simulate", "--config", at("bad.cfg"), "--out", at("out")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.cfg:2: rates.limit_ask"), std::string::npos) << r.err;
}

TEST_F(CliTest, PresetAndConfigAreExclusive) {
  EXPECT_EQ(cli({"simulate", "--preset", "balanced", "--config", "x.cfg"}).code, 2);
  EXPECT_EQ(cli({"simulate"}).code, 2);
  EXPECT_EQ(cli({"simulate", "--preset", "nope"}).code, 2);
  EXPECT_EQ(cli({"simulate", "--preset", "balanced", "no.such.key=1"}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
}

TEST_F(CliTest, UnwritableOutputExitsThree) {
  fs::create_directories(root_);
  std::ofstream(root_ / "file") << "x";
  const auto r = cli({"simulate", "--preset", "balanced", "--out", at("file/sub"), "horizon.seconds=20"});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, PresetsListMatchesAcceptedNames) {
  const auto r = cli({"presets", "--names"});
  ASSERT_EQ(r.code, 0);
  std::string expected;
  for (const auto& n : preset_names()) expected += n + "\n";
  EXPECT_EQ(r.out, expected);
  for (const auto& n : preset_names()) {
    EXPECT_EQ(cli({"simulate", "--preset", n, "--out", at(n), "horizon.events=2000"}).code, 0) << n;
  }
}

TEST_F(CliTest, VersionFlag) {
  const auto r = cli({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "cob " + std::string(version()) + "\n");
}

TEST_F(CliTest, AnalyzeNoMarketReportsFlatSlope) {
  ASSERT_EQ(cli({"simulate", "--preset", "no_market", "--out", at("nm"), "horizon.events=200000"}).code, 0);
  const auto r = cli({"analyze", at("nm")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("slope of mean |volume| over levels 20..500"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("+/-"), std::string::npos);
  for (const auto name : {"profile.csv", "spread_response.csv", "spread_fit.csv", "drift.csv", "power_law_fit.csv",
                          "inter_arrival.csv", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(root_ / "nm" / "analysis" / name)) << name;
  }
}

TEST_F(CliTest, AnalyzeHighMarketReportsBetaWithInterval) {
  ASSERT_EQ(cli({"simulate", "--preset", "high_market", "--out", at("hm"), "horizon.events=100000"}).code, 0);
  const auto r = cli({"analyze", at("hm"), "--out", at("hm_stats")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("beta = "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("95% CI ["), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "hm_stats" / "summary.txt"));
}

TEST_F(CliTest, AnalyzeTruncatedLogExitsTwoWithLine) {
  ASSERT_EQ(cli({"simulate", "--preset", "balanced", "--out", at("t"), "horizon.seconds=30"}).code, 0);
  const auto path = root_ / "t" / files::kEvents;
  auto text = slurp(path);
  std::size_t pos = 0;
  for (int i = 0; i < 50; ++i) pos = text.find('\n', pos) + 1;
  text.resize(pos + 15);
  std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
  const auto r = cli({"analyze", at("t")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("events.ndjson:51:"), std::string::npos) << r.err;
}

TEST_F(CliTest, BatchSeedsAndAggregate) {
  const auto r = cli({"simulate", "--preset", "balanced", "--seeds", "3..5", "--out", at("batch"), "--jobs", "2",
                      "--quiet", "horizon.seconds=200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  for (int s = 3; s <= 5; ++s) EXPECT_TRUE(fs::exists(root_ / "batch" / ("seed_" + std::to_string(s)) / files::kEvents));
  EXPECT_EQ(cli::discover_runs(root_ / "batch").size(), 3u);
  const auto a = cli({"analyze", at("batch")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("runs: 3"), std::string::npos) << a.out;
  const auto drift = slurp(root_ / "batch" / "analysis" / "drift.csv");
  EXPECT_NE(drift.find("\npooled,"), std::string::npos);
  EXPECT_EQ(cli({"simulate", "--preset", "balanced", "--seeds", "5..3"}).code, 2);
}

TEST_F(CliTest, AnalyzeMissingDirectoryExitsTwo) {
  EXPECT_EQ(cli({"analyze", at("nothing")}).code, 2);
}

TEST_F(CliTest, DiagnosticsPrintsBalance) {
  const auto r = cli({"diagnostics", "--preset", "balanced"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("S_C = "), std::string::npos);
  EXPECT_NE(r.out.find("provisional"), std::string::npos);
  EXPECT_NE(r.out.find("stable = "), std::string::npos);
}

}  // namespace
}  // namespace cob
