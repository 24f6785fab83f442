#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "pst/io.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pst_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(PST_CLI_PATH) + " " + args + " >" + (dir_ / "stdout").string() + " 2>" +
                            (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string slurp(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  json report(const std::string& name) const { return json::parse(slurp(name)); }

  fs::path dir_;
};

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_NE(slurp("stdout").find("transform"), std::string::npos);
  EXPECT_EQ(run("transform --help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("transform --no-such-flag"), 2);
  EXPECT_EQ(run("transform --in synth:pulse --preset fig1 --warp 3"), 2);
  EXPECT_EQ(run("transform --in synth:pulse --preset nope"), 2);
  EXPECT_EQ(run("transform --in synth:pulse --lpf abc"), 2);
  EXPECT_EQ(run("transform --in synth:bogus"), 2);
  EXPECT_EQ(run("line-scan --in synth:testcard"), 2);
}

TEST_F(Cli, ComputeErrorsExitOne) {
  EXPECT_EQ(run("transform --in " + path("missing.pgm")), 1);
  EXPECT_NE(slurp("stderr").find("error"), std::string::npos);
  {
    std::ofstream(path("bad.csv")) << "1\n2\nnope\n";
  }
  EXPECT_EQ(run("transform --in " + path("bad.csv")), 1);
  EXPECT_EQ(run("transform --in synth:pulse --warp -1"), 1);
  EXPECT_EQ(run("line-scan --row 9999"), 1);
}

TEST_F(Cli, PresetsCarryExactParameters) {
  const std::vector<std::tuple<std::string, double, double>> presets{
      {"fig1", 22.0, 500.0}, {"fig2", 12.5, 4000.0}, {"fig3-4", 12.15, 0.48}};
  for (const auto& [name, warp, strength] : presets) {
    ASSERT_EQ(run("transform --in synth:pulse --preset " + name + " --report " + path("r.json")), 0);
    const auto r = report("r.json");
    EXPECT_EQ(r["parameters"]["warp"].get<double>(), warp);
    EXPECT_EQ(r["parameters"]["strength"].get<double>(), strength);
    EXPECT_EQ(r["parameters"]["preset"], name);
  }
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  // reports embed output paths, so both runs write to the same files
  const std::vector<std::string> files = {"h.png", "p.pgm", "r.json", "t.csv"};
  std::vector<std::string> first;
  for (int i = 0; i < 2; ++i) {
    ASSERT_EQ(run("hybrid --out " + path("h.png") + " --pst-out " + path("p.pgm") + " --report " + path("r.json")), 0);
    ASSERT_EQ(run("transform --in synth:staircase --out " + path("t.csv")), 0);
    for (std::size_t f = 0; f < files.size(); ++f) {
      const std::string bytes = slurp(files[f]);
      EXPECT_FALSE(bytes.empty()) << files[f];
      if (i == 0) first.push_back(bytes);
      else EXPECT_EQ(bytes, first[f]) << files[f];
    }
  }
  EXPECT_TRUE(fs::exists(path("h.png.scale.txt")));
}

TEST_F(Cli, TransformSignalCsvAndStdin) {
  ASSERT_EQ(run("synth pulse --out " + path("pulse.csv") + " --truth-out " + path("truth.json")), 0);
  ASSERT_EQ(run("transform --in " + path("pulse.csv") + " --truth " + path("truth.json") + " --out " +
                path("o.csv") + " --report " + path("r.json")),
            0);
  const auto values = pst::read_signal_csv(fs::path(path("o.csv")));
  EXPECT_EQ(values.size(), 512u);
  const auto r = report("r.json");
  EXPECT_EQ(r["schema"], 1);
  EXPECT_EQ(r["command"], "transform");
  EXPECT_EQ(r["input"]["length"], 512);
  EXPECT_EQ(r["ground_truth"]["edges"].size(), 2u);

  const std::string cmd = "transform --in - --out " + path("o2.csv") + " < " + path("pulse.csv");
  ASSERT_EQ(run(cmd), 0);
  EXPECT_EQ(slurp("o.csv"), slurp("o2.csv"));
}

TEST_F(Cli, ImageTransformAndThreshold) {
  ASSERT_EQ(run("synth testcard --width 96 --height 80 --out " + path("card.png")), 0);
  const auto card = pst::load_image(fs::path(path("card.png")));
  EXPECT_EQ(card.max_code, 16383u);
  for (const std::string method : {"pst", "derivative", "hybrid"}) {
    ASSERT_EQ(run("transform --method " + method + " --in " + path("card.png") + " --out " + path("m.pgm") +
                  " --depth 16 --threshold-out " + path("t.pgm") + " --q-lo 0.9 --report " + path("r.json")),
              0)
        << method;
    const auto m = pst::load_image(fs::path(path("m.pgm")));
    EXPECT_EQ(m.width(), 96u);
    EXPECT_EQ(m.max_code, 65535u);
    EXPECT_GT(report("r.json")["threshold"]["selected"].get<int>(), 0);
  }
  EXPECT_EQ(run("transform --method oracle --in " + path("card.png")), 2);
}

TEST_F(Cli, CompareOracleReport) {
  ASSERT_EQ(run("compare-oracle --preset fig2 --strength-scale small --out " + path("c.csv") + " --report " +
                path("r.json")),
            0);
  const auto r = report("r.json");
  EXPECT_GE(r["oracle"]["correlation"].get<double>(), 0.99);
  EXPECT_LE(r["oracle"]["normalized_deviation"].get<double>(), 0.05);
  EXPECT_EQ(r["parameters"]["strength"].get<double>(), 0.05);
  EXPECT_TRUE(r["parameters"]["lpf"].is_null());
  EXPECT_EQ(slurp("c.csv").substr(0, 36), "index,input,numerical,oracle,valid\n0");
  EXPECT_EQ(run("compare-oracle --strength-scale -3"), 2);
}

TEST_F(Cli, SweepContrastAndLineScan) {
  ASSERT_EQ(run("sweep-contrast --preset fig3-4 --lpf none --report " + path("r.json")), 0);
  const auto r = report("r.json");
  EXPECT_LT(r["derivative"]["contrast_proportionality_deviation"].get<double>(), 1e-3);
  EXPECT_GT(r["pst"]["contrast_proportionality_deviation"].get<double>(), 0.05);
  EXPECT_EQ(r["pst"]["edges"].size(), 6u);

  ASSERT_EQ(run("line-scan --row 40 --out " + path("l.csv")), 0);
  EXPECT_EQ(slurp("l.csv").substr(0, 27), "index,value,pst,derivative\n");
}

TEST_F(Cli, ConfigFileWithFlagPrecedence) {
  {
    std::ofstream(path("cfg.json")) << R"({"warp": 7.5, "strength": 0.3, "lpf": "none"})";
  }
  ASSERT_EQ(run("transform --in synth:pulse --config " + path("cfg.json") + " --strength 0.9 --report " +
                path("r.json")),
            0);
  const auto r = report("r.json");
  EXPECT_EQ(r["parameters"]["warp"].get<double>(), 7.5);
  EXPECT_EQ(r["parameters"]["strength"].get<double>(), 0.9);
  EXPECT_TRUE(r["parameters"]["lpf"].is_null());
  {
    std::ofstream(path("bad.json")) << R"({"nonsense": 1})";
  }
  EXPECT_EQ(run("transform --in synth:pulse --config " + path("bad.json")), 2);
}

}  // namespace
