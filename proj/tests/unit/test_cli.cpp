#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = LONGTIE_FIXTURE_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = longtie::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("longtie_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CompleteGraphEdgeListHasRangeTwoEverywhere) {
  auto r = run({"tie-range", "--edges", (kFixtures / "k4_edges.csv").string(), "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("out/tie_range.csv")), "u,v,tie_range\na,b,2\na,c,2\na,d,2\nb,c,2\nb,d,2\nc,d,2\n");
  auto manifest = nlohmann::json::parse(slurp(path("out/manifest.json")));
  EXPECT_EQ(manifest["subcommand"], "tie-range");
  EXPECT_EQ(manifest["format"], "longtie-manifest");
  ASSERT_EQ(manifest["outputs"].size(), 2u);
  EXPECT_EQ(manifest["outputs"][1]["file"], "tie_range.csv");
  EXPECT_EQ(manifest["outputs"][1]["bytes"], 50);
}

TEST_F(Cli, IngestAggregatesIntoPhases) {
  auto r = run({"ingest", "--input", (kFixtures / "k4_events.csv").string(), "--window-months", "3",
                "--total-months", "6", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto summary = nlohmann::json::parse(slurp(path("out/summary.json")));
  EXPECT_EQ(summary["nodes"], 4);
  ASSERT_EQ(summary["phases"].size(), 2u);
  EXPECT_EQ(summary["phases"][0]["edges"], 6);
}

TEST_F(Cli, TieRangeOnEventsWritesOneFilePerPhase) {
  auto r = run({"tie-range", "--input", (kFixtures / "k4_events.csv").string(), "--window-months", "3",
                "--total-months", "6", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("out/tie_range_phase0.csv")));
  EXPECT_TRUE(fs::exists(path("out/tie_range_phase1.csv")));
  EXPECT_FALSE(fs::exists(path("out/tie_range_phase2.csv")));
}

TEST_F(Cli, UnknownFlagIsUsageError) {
  auto r = run({"tie-range", "--bogus", "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["kind"], "usage");
}

TEST_F(Cli, MalformedCsvReportsLine) {
  {
    std::ofstream f(path("bad.csv"));
    f << "caller,callee,month,calls,texts,duration_s\na,b,0,1,0,5\nc,c,0,1,0,5\n";
  }
  auto r = run({"ingest", "--input", path("bad.csv"), "--out", path("out")});
  EXPECT_EQ(r.code, 1);
  auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["kind"], "parse_error");
  EXPECT_EQ(j["error"]["line"], 3);
  EXPECT_EQ(j["error"]["subcommand"], "ingest");
}

TEST_F(Cli, MissingInputIsReported) {
  auto r = run({"dynamics", "--input", path("nope.csv"), "--out", path("out")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.csv"), std::string::npos);
}

TEST_F(Cli, SilentPhaseUnderFilterIsRejected) {
  // The fixture covers six months; a 24-month span leaves phases 2..7 empty.
  auto r = run({"ingest", "--input", (kFixtures / "k4_events.csv").string(), "--out", path("out")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--total-months"), std::string::npos);
  EXPECT_EQ(run({"ingest", "--input", (kFixtures / "k4_events.csv").string(), "--no-filter", "--out", path("o2")}).code, 0);
}

TEST_F(Cli, SynthIsDeterministicAndRequiresSeed) {
  EXPECT_EQ(run({"synth", "--nodes", "60", "--out", path("x")}).code, 1);
  for (const char* d : {"a", "b"}) {
    auto r = run({"synth", "--nodes", "60", "--seed", "3", "--out", path(d)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(path("a/events.csv")), slurp(path("b/events.csv")));
  EXPECT_EQ(slurp(path("a/manifest.json")), slurp(path("b/manifest.json")));
}

TEST_F(Cli, SynthFitBenefitPipeline) {
  ASSERT_EQ(run({"synth", "--nodes", "80", "--seed", "9", "--out", path("syn")}).code, 0);
  {
    std::ofstream f(path("cfg.json"));
    f << R"({"fit": {"nodes_per_epoch": 40, "batch_size": 10, "test_nodes": 10}})";
  }
  auto fit = run({"fit", "--input", path("syn/events.csv"), "--config", path("cfg.json"), "--epochs", "3",
                  "--dims", "2", "--seed", "1", "--window-months", "3", "--total-months", "12", "--no-filter",
                  "--out", path("fit")});
  ASSERT_EQ(fit.code, 0) << fit.err;
  auto ckpt = nlohmann::json::parse(slurp(path("fit/endowments.json")));
  EXPECT_EQ(ckpt["dims"], 2);
  EXPECT_EQ(slurp(path("fit/learning_curve.csv")).rfind("epoch,train_loss,test_loss\n", 0), 0u);
  auto bbr = run({"benefit-by-range", "--input", path("syn/events.csv"), "--endowments", path("fit/endowments.json"),
                  "--window-months", "3", "--total-months", "12", "--no-filter", "--out", path("bbr")});
  ASSERT_EQ(bbr.code, 0) << bbr.err;
  EXPECT_EQ(slurp(path("bbr/benefit_by_range.csv")).rfind("group,panel,key,n,mean,ci_low,ci_high,present\n", 0), 0u);
}

TEST_F(Cli, ManifestReplayReproducesOutputs) {
  ASSERT_EQ(run({"synth", "--nodes", "50", "--seed", "4", "--out", path("a")}).code, 0);
  ASSERT_EQ(run({"synth", "--config", path("a/manifest.json"), "--out", path("b")}).code, 0);
  EXPECT_EQ(slurp(path("a/events.csv")), slurp(path("b/events.csv")));
}

TEST_F(Cli, SimulateReplaysSynth) {
  ASSERT_EQ(run({"synth", "--nodes", "60", "--phases", "3", "--seed", "5", "--out", path("syn")}).code, 0);
  auto r = run({"simulate", "--edges", path("syn/initial_edges.csv"), "--endowments",
                path("syn/planted_endowments.json"), "--phases", "3", "--seed", "5", "--out", path("sim")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("syn/events.csv")), slurp(path("sim/events.csv")));
}

TEST_F(Cli, AnalysesRunOnSynthData) {
  ASSERT_EQ(run({"synth", "--nodes", "80", "--seed", "2", "--out", path("syn")}).code, 0);
  const std::vector<std::string> common{"--input", path("syn/events.csv"), "--window-months", "3",
                                        "--total-months", "12", "--no-filter"};
  for (std::vector<std::string> args : {std::vector<std::string>{"dynamics"}, {"transitions"}, {"lifespan"},
                                        {"degree"}, {"new-existing"}, {"sensitivity", "--seed", "1"}}) {
    const std::string name = args.front();
    args.insert(args.end(), common.begin(), common.end());
    args.push_back("--out");
    args.push_back(path(name));
    auto r = run(args);
    EXPECT_EQ(r.code, 0) << name << ": " << r.err;
    EXPECT_TRUE(fs::exists(path(name + "/manifest.json"))) << name;
  }
}
