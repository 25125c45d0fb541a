#include "dsgen/cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "dsgen/dataset_io.hpp"
#include "dsgen/reports.hpp"
#include "dsgen/synthetic_scene.hpp"

namespace dsgen {
namespace {

using nlohmann::json;

struct CommandResult {
  int status;
  std::string out;
  std::string err;
};

CommandResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::dispatch(args, out, err);
  return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    base_ = fs::temp_directory_path() / (std::string("dsgen_cli_") + info->name());
    fs::remove_all(base_);
    fs::create_directories(base_);
  }
  void TearDown() override { fs::remove_all(base_); }

  fs::path dir(const std::string& name) const { return base_ / name; }
  std::string str(const std::string& name) const { return dir(name).string(); }

  static StereoRig rig() { return StereoRig(CameraIntrinsics(360.0, 160.5, 60.0), 0.54); }

  SyntheticScene scene(double roll, double pitch, std::uint64_t seed, const std::string& id) const {
    const Eigen::Vector3d n(-std::sin(roll), std::cos(roll) * std::cos(pitch),
                            std::cos(roll) * std::sin(pitch));
    SyntheticScene s{rig(), PlaneParams(n, 1.6), TextureSpec{TextureKind::kSinusoid, 1.0, seed}};
    s.width = 320;
    s.height = 120;
    s.max_depth = 30.0;
    s.sample_id = id;
    return s;
  }

  /// Three complete rendered samples plus calib.json under `name`.
  fs::path make_dataset(const std::string& name) const {
    const fs::path root = dir(name);
    save_sample(root, render_planar_scene(scene(0.0, 0.0, 1, "000000")));
    save_sample(root, render_planar_scene(scene(0.02, 0.01, 2, "000001")));
    save_sample(root, render_planar_scene(scene(-0.03, 0.0, 3, "000002")));
    save_calibration(dir("calib.json"), rig());
    return root;
  }

  fs::path base_;
};

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      files[e.path().lexically_relative(root).generic_string()] = read_file(e.path());
    }
  }
  return files;
}

json load(const fs::path& path) { return json::parse(read_file(path)); }

TEST_F(CliTest, AugmentThreeSamples) {
  const fs::path root = make_dataset("data");
  const CommandResult r = run({"augment", "--root", root.string(), "--calib", str("calib.json"), "--out",
                     str("out")});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto files = tree_bytes(dir("out"));
  EXPECT_EQ(files.size(), 3u + 3u + 2u);
  for (const char* id : {"000000", "000001", "000002"}) {
    const std::string gen = std::string(id) + "_gen.png";
    ASSERT_TRUE(files.count("image_2/" + gen)) << gen;
    ASSERT_TRUE(files.count("gt_mask/" + gen)) << gen;
    EXPECT_EQ(files.at("gt_mask/" + gen), read_file(root / "gt_mask" / (std::string(id) + ".png")));
  }
  std::istringstream manifest(files.at("manifest.jsonl"));
  int lines = 0;
  for (std::string line; std::getline(manifest, line);) ++lines;
  EXPECT_EQ(lines, 3);

  const json report = load(dir("out") / "augment_report.json");
  EXPECT_EQ(report["summary"]["generated"], 3);
  EXPECT_EQ(report["samples"].size(), 3u);
  for (const auto& s : report["samples"]) {
    EXPECT_EQ(s["status"], "ok");
    EXPECT_TRUE(s["fit"]["plane"].is_object());
    EXPECT_NEAR(s["fit"]["plane"]["D"].get<double>(), 1.6, 1e-3);
  }
}

TEST_F(CliTest, FitReportsPlanePerSample) {
  const fs::path root = make_dataset("data");
  const CommandResult r = run({"fit", "--root", root.string(), "--calib", str("calib.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  const json report = load(root / "fit_report.json");
  ASSERT_EQ(report["samples"].size(), 3u);
  EXPECT_EQ(report["samples"][1]["sample_id"], "000001");
  EXPECT_NEAR(report["samples"][1]["fit"]["phi_rad"].get<double>(), 0.02, 1e-3);
  for (const char* key : {"phi_rad", "varkappa", "kappa", "residual_energy", "m"}) {
    EXPECT_TRUE(report["samples"][0]["fit"].contains(key)) << key;
  }

  const CommandResult global = run({"fit", "--root", root.string(), "--global-model", "--out", str("g")});
  ASSERT_EQ(global.status, 0) << global.err;
  const json g = load(dir("g") / "fit_report.json");
  EXPECT_EQ(g["samples"][0]["fit"]["phi_rad"], g["samples"][2]["fit"]["phi_rad"]);
}

TEST_F(CliTest, EvaluateIdenticalDirectoriesIsPerfect) {
  const fs::path root = make_dataset("data");
  const std::string masks = (root / "gt_mask").string();
  const CommandResult r = run({"evaluate", "--pred", masks, "--gt", masks, "--out", str("eval")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("100.00"), std::string::npos);
  const json report = load(dir("eval") / "metrics.json");
  for (const char* key : {"accuracy", "precision", "recall", "fscore", "iou"}) {
    EXPECT_EQ(report["overall"][key].get<double>(), 1.0) << key;
  }
  EXPECT_TRUE(fs::exists(dir("eval") / "metrics.txt"));
}

TEST_F(CliTest, EvaluateMissingPredictionIsPartial) {
  const fs::path root = make_dataset("data");
  fs::create_directories(dir("pred"));
  fs::copy_file(root / "gt_mask" / "000000.png", dir("pred") / "000000.png");
  const std::string gt = (root / "gt_mask").string();
  EXPECT_EQ(run({"evaluate", "--pred", str("pred"), "--gt", gt}).status, cli::kPartial);
  EXPECT_EQ(run({"evaluate", "--pred", str("pred"), "--gt", gt, "--strict"}).status, cli::kFailure);
}

TEST_F(CliTest, DemoPassesSelfCheck) {
  const CommandResult r = run({"demo", "--seed", "0", "--out", str("demo")});
  ASSERT_EQ(r.status, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("branch partition"), std::string::npos);
  const json report = load(dir("demo") / "demo_report.json");
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_LE(report["photometric_mae"].get<double>(), 2.0 / 255.0);
  EXPECT_TRUE(report["branches"]["partition_exact"].get<bool>());
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).status, cli::kUsage);
  EXPECT_EQ(run({"augment", "--bogus"}).status, cli::kUsage);
  EXPECT_EQ(run({"fit", "--grid-step", "-1", "--root", "."}).status, cli::kUsage);
  EXPECT_EQ(run({"augment", "--interp", "cubic"}).status, cli::kUsage);
  const fs::path root = make_dataset("data");
  const CommandResult no_out = run({"augment", "--root", root.string()});
  EXPECT_EQ(no_out.status, cli::kUsage);
  EXPECT_NE(no_out.err.find("\"status\":\"error\""), std::string::npos);
}

TEST_F(CliTest, EmptyOrMissingInputFails) {
  fs::create_directories(dir("empty"));
  const CommandResult empty = run({"fit", "--root", str("empty")});
  EXPECT_EQ(empty.status, cli::kFailure);
  EXPECT_NE(empty.err.find("insufficient_data"), std::string::npos);
  EXPECT_EQ(run({"fit", "--root", str("absent")}).status, cli::kFailure);
  EXPECT_FALSE(fs::exists(dir("empty") / "fit_report.json"));
}

TEST_F(CliTest, IncompleteSampleIsSkippedOrAborts) {
  const fs::path root = make_dataset("data");
  fs::remove(root / "disp" / "000001.png");
  const CommandResult partial = run({"augment", "--root", root.string(), "--out", str("out")});
  EXPECT_EQ(partial.status, cli::kPartial);
  const json report = load(dir("out") / "augment_report.json");
  EXPECT_EQ(report["summary"]["generated"], 2);
  EXPECT_EQ(report["samples"][1]["status"], "skipped");
  EXPECT_EQ(report["samples"][1]["error"], "incomplete_sample");

  EXPECT_EQ(run({"augment", "--root", root.string(), "--out", str("strict"), "--strict"}).status,
            cli::kFailure);
  EXPECT_FALSE(fs::exists(dir("strict") / "manifest.jsonl"));
}

TEST_F(CliTest, ConfigFileSetsOptions) {
  const fs::path root = make_dataset("data");
  std::ofstream(dir("cfg.json")) << R"({"max_samples": 500, "interp": "nearest", "trim": true})";
  const CommandResult r = run({"augment", "--root", root.string(), "--out", str("out"), "--config",
                     str("cfg.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  const json settings = load(dir("out") / "augment_report.json")["settings"];
  EXPECT_EQ(settings["max_samples"], 500);
  EXPECT_EQ(settings["interp"], "nearest");
  EXPECT_EQ(settings["trim"], true);
  EXPECT_EQ(load(dir("out") / "augment_report.json")["samples"][0]["fit"]["m"], 500);

  std::ofstream(dir("bad.json")) << "{not json";
  EXPECT_EQ(run({"fit", "--root", root.string(), "--config", str("bad.json")}).status, cli::kUsage);
  std::ofstream(dir("unknown.json")) << R"({"no_such_option": 1})";
  EXPECT_EQ(run({"fit", "--root", root.string(), "--config", str("unknown.json")}).status,
            cli::kUsage);
  EXPECT_EQ(run({"fit", "--root", root.string(), "--config", str("absent.json")}).status,
            cli::kUsage);

  // Command-line values take precedence over the file.
  const CommandResult cli_wins = run({"augment", "--root", root.string(), "--out", str("out2"),
                                      "--config", str("cfg.json"), "--max-samples", "700"});
  ASSERT_EQ(cli_wins.status, 0) << cli_wins.err;
  EXPECT_EQ(load(dir("out2") / "augment_report.json")["settings"]["max_samples"], 700);
}

TEST_F(CliTest, RerunWithoutOverwriteRefuses) {
  const fs::path root = make_dataset("data");
  const std::vector<std::string> args{"augment", "--root", root.string(), "--out", str("out")};
  ASSERT_EQ(run(args).status, 0);
  const auto before = tree_bytes(dir("out"));
  EXPECT_EQ(run(args).status, cli::kPartial);
  auto after = tree_bytes(dir("out"));
  for (const auto& [name, bytes] : before) {
    if (name != "augment_report.json") EXPECT_EQ(after[name], bytes) << name;
  }
  auto strict = args;
  strict.push_back("--strict");
  EXPECT_EQ(run(strict).status, cli::kFailure);
}

TEST_F(CliTest, OverwriteIsIdempotentAndJobsDoNotMatter) {
  const fs::path root = make_dataset("data");
  const std::vector<std::string> args{"augment", "--root", root.string(), "--out", str("a"),
                                      "--overwrite", "--seed", "3"};
  ASSERT_EQ(run(args).status, 0);
  const auto first = tree_bytes(dir("a"));
  ASSERT_EQ(run(args).status, 0);
  EXPECT_EQ(tree_bytes(dir("a")), first);

  ASSERT_EQ(run({"augment", "--root", root.string(), "--out", str("b"), "--seed", "3", "--jobs",
                 "3"})
                .status,
            0);
  EXPECT_EQ(tree_bytes(dir("b")), first);
}

TEST_F(CliTest, RenderIsDeterministic) {
  save_json(dir("scene.json"), scene_to_json(scene(0.01, 0.0, 5, "r0")));
  ASSERT_EQ(run({"render", "--scene", str("scene.json"), "--out", str("r1")}).status, 0);
  ASSERT_EQ(run({"render", "--scene", str("scene.json"), "--out", str("r2")}).status, 0);
  const auto one = tree_bytes(dir("r1"));
  EXPECT_EQ(one.size(), 6u);
  EXPECT_EQ(tree_bytes(dir("r2")), one);
  EXPECT_EQ(run({"render", "--scene", str("scene.json"), "--out", str("r1")}).status,
            cli::kFailure);
  ASSERT_EQ(run({"render", "--scene", str("scene.json"), "--out", str("r3"), "--seed", "9"}).status,
            0);
  EXPECT_NE(read_file(dir("r3") / "image_2" / "r0.png"), one.at("image_2/r0.png"));
}

}  // namespace
}  // namespace dsgen
