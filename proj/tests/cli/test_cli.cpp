#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "autolabel/io/labels_io.hpp"
#include "autolabel/io/ply.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = "") {
  const std::string cmd = (env.empty() ? "" : env + " ") + std::string(AUTOLABEL_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("autolabel_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
    std::ofstream(dir_ / "spec.json") << R"({"floor": [3, 3], "walls": 1, "wall_height": 1.5, "density": 700,
      "objects": [
        {"kind": "box", "category": "crate", "size": [0.6, 0.5, 0.4], "position": [0.3, -0.2, 0], "yaw_deg": 20},
        {"kind": "cylinder", "category": "drum", "size": [0.25, 0, 0.7], "position": [-0.6, 0.6, 0]}]})";
    const CliRun s = run("synth " + (dir_ / "spec.json").string() + " --out " + (dir_ / "scene").string());
    ASSERT_EQ(s.code, 0) << s.out;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static fs::path dir_;
};

fs::path CliTest::dir_;

}  // namespace

TEST_F(CliTest, VersionAndHelp) {
  const CliRun v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("autolabel "), std::string::npos);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_NE(run("").code, 0);
}

TEST_F(CliTest, LabelWritesAllOutputs) {
  const fs::path out = dir_ / "label";
  const CliRun r = run("label " + (dir_ / "scene" / "manifest.json").string() + " --out " + out.string() + " --debug-ply");
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"labels_hard.ply", "labels_weak.ply", "labels_soft.slbl", "labels_soft.csv", "classes.txt",
                        "run_report.json", "debug_scores.ply", "svm_section_1.txt", "svm_section_2.txt"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto cloud = autolabel::read_point_cloud(dir_ / "scene" / "cloud.ply");
  const auto hard = autolabel::read_label_ply(out / "labels_hard.ply");
  EXPECT_EQ(hard.labels.size(), cloud.size());
  const auto soft = autolabel::read_soft_labels(out / "labels_soft.slbl");
  EXPECT_EQ(soft.points, cloud.size());
  EXPECT_EQ(soft.classes.size(), 3u);
  const json report = read_json(out / "run_report.json");
  EXPECT_EQ(report["points"].get<std::size_t>(), cloud.size());
  EXPECT_EQ(report["sections"].size(), 2u);
  const auto debug = autolabel::read_ply(out / "debug_scores.ply");
  for (const char* col : {"section", "region", "rscore", "dscore", "svmscore", "c"}) {
    EXPECT_NE(debug.find(col), nullptr) << col;
  }
}

TEST_F(CliTest, EvaluateIdenticalLabelsIsPerfect) {
  const fs::path cloud = dir_ / "scene" / "cloud.ply";
  const CliRun r = run("evaluate --pred " + cloud.string() + " --gt " + cloud.string() + " --cloud " + cloud.string() +
                    " --classes " + (dir_ / "scene" / "classes.txt").string() + " --out " +
                    (dir_ / "self.json").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = read_json(dir_ / "self.json");
  EXPECT_DOUBLE_EQ(j["oa"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["miou"].get<double>(), 100.0);
  EXPECT_EQ(j["confusion"]["classes"].size(), 3u);
}

TEST_F(CliTest, AblationRowsMatchLabelThenEvaluate) {
  const fs::path manifest = dir_ / "scene" / "manifest.json";
  const fs::path cloud = dir_ / "scene" / "cloud.ply";
  std::ofstream(dir_ / "list.txt") << "scene/manifest.json\n";
  const CliRun a = run("ablate " + (dir_ / "list.txt").string() + " --gt-available --out " + (dir_ / "abl").string());
  ASSERT_EQ(a.code, 0) << a.out;
  const json rows = read_json(dir_ / "abl" / "ablation.json");
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    const std::string subset = row["scores"].get<std::string>();
    const fs::path out = dir_ / ("abl_" + std::to_string(std::hash<std::string>{}(subset)));
    const CliRun l = run("label " + manifest.string() + " --scheme hard --scores " + subset + " --out " + out.string());
    ASSERT_EQ(l.code, 0) << l.out;
    const CliRun e = run("evaluate --pred " + (out / "labels_hard.ply").string() + " --gt " + cloud.string() +
                      " --cloud " + cloud.string() + " --classes " + (dir_ / "scene" / "classes.txt").string() +
                      " --out " + (out / "eval.json").string());
    ASSERT_EQ(e.code, 0) << e.out;
    const json ev = read_json(out / "eval.json");
    EXPECT_NEAR(row["hard"]["oa"].get<double>(), ev["oa"].get<double>(), 1e-9) << subset;
    EXPECT_NEAR(row["hard"]["miou"].get<double>(), ev["miou"].get<double>(), 1e-9) << subset;
    EXPECT_NEAR(row["hard"]["miou_boundary"].get<double>(), ev["miou_boundary"].get<double>(), 1e-9) << subset;
  }
}

TEST_F(CliTest, JsonReportFlag) {
  const CliRun r = run("label " + (dir_ / "scene" / "manifest.json").string() + " --scheme weak --json-report --out " +
                    (dir_ / "jr").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.contains("timings_s"));
  EXPECT_TRUE(fs::exists(dir_ / "jr" / "labels_weak.ply"));
  EXPECT_FALSE(fs::exists(dir_ / "jr" / "labels_hard.ply"));
}

TEST_F(CliTest, ConfigFromEnvironmentAndFlag) {
  std::ofstream(dir_ / "cfg.json") << R"({"scores": "dist"})";
  const fs::path manifest = dir_ / "scene" / "manifest.json";
  const CliRun r = run("label " + manifest.string() + " --scheme hard --config " + (dir_ / "cfg.json").string() +
                    " --out " + (dir_ / "cfg_out").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("scores=dist"), std::string::npos) << r.out;
  const CliRun env = run("label " + manifest.string() + " --scheme hard --out " + (dir_ / "env_out").string(),
                      "AUTOLABEL_CONFIG=" + (dir_ / "cfg.json").string());
  ASSERT_EQ(env.code, 0) << env.out;
  EXPECT_NE(env.out.find("scores=dist"), std::string::npos) << env.out;
}

TEST_F(CliTest, ErrorsExitNonZeroWithMessage) {
  const CliRun missing = run("label " + (dir_ / "nope.json").string() + " --out " + (dir_ / "x").string());
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.out.find("nope.json"), std::string::npos) << missing.out;
  std::ofstream(dir_ / "bad_cfg.json") << R"({"svm": {"C": -2}})";
  const CliRun bad = run("label " + (dir_ / "scene" / "manifest.json").string() + " --config " +
                      (dir_ / "bad_cfg.json").string() + " --out " + (dir_ / "y").string());
  EXPECT_EQ(bad.code, 1);
  const CliRun no_gt = run("ablate " + (dir_ / "scene" / "manifest.json").string() + " --out " + (dir_ / "z").string());
  EXPECT_NE(no_gt.code, 0);
  EXPECT_NE(run("label --bogus").code, 0);
}
