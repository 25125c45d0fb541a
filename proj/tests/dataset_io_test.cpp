#include "dsgen/dataset_io.hpp"

#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "dsgen/error.hpp"

namespace dsgen {
namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "a") {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("dsgen_io_") + info->test_suite_name() +
                                         "_" + info->name() + "_" + tag);
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

StereoSample make_sample(const std::string& id, int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  StereoSample s;
  s.sample_id = id;
  s.ref_image = Image(width, height, 3);
  s.tgt_image = Image(width, height, 3);
  s.disparity = DisparityMap(width, height);
  s.road_mask = BinaryMask(width, height);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      for (int c = 0; c < 3; ++c) {
        s.ref_image.at(u, v, c) = static_cast<std::uint8_t>(rng() >> 56);
        s.tgt_image.at(u, v, c) = static_cast<std::uint8_t>(rng() >> 56);
      }
      if (v > height / 2) {
        s.disparity.at(u, v) = static_cast<double>(1 + rng() % 20000) / 256.0;
        s.road_mask.set(u, v, (u + v) % 3 != 0);
      }
    }
  }
  return s;
}

std::string error_message(ErrorCode code, auto&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected error " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
    return e.what();
  }
  return {};
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

TEST(DatasetIo, SampleRoundTripIsByteIdentical) {
  TempDir a;
  TempDir b_root("b");
  const StereoSample sample = make_sample("000007", 37, 23, 1);
  save_sample(a.path(), sample);
  const StereoSample loaded = load_sample(a.path(), "000007");
  EXPECT_EQ(loaded.ref_image, sample.ref_image);
  EXPECT_EQ(loaded.tgt_image, sample.tgt_image);
  EXPECT_EQ(loaded.disparity, sample.disparity);
  EXPECT_EQ(loaded.road_mask, sample.road_mask);

  const fs::path b = b_root.path();
  save_sample(b, loaded);
  for (auto dir : {kRefDir, kTgtDir, kDispDir, kMaskDir}) {
    const fs::path rel = fs::path(dir) / "000007.png";
    EXPECT_EQ(read_file(a.path() / rel), read_file(b / rel)) << rel;
  }
}

TEST(DatasetIo, GrayImageRoundTrip) {
  TempDir dir;
  Image gray(5, 4, 1);
  for (int v = 0; v < 4; ++v)
    for (int u = 0; u < 5; ++u) gray.at(u, v) = static_cast<std::uint8_t>(u * 40 + v);
  save_image(dir.path() / "g.png", gray);
  EXPECT_EQ(load_image(dir.path() / "g.png"), gray);
}

TEST(DatasetIo, ColorChannelOrderIsRgb) {
  TempDir dir;
  Image red(2, 2, 3);
  for (int v = 0; v < 2; ++v)
    for (int u = 0; u < 2; ++u) red.at(u, v, 0) = 255;
  save_image(dir.path() / "red.png", red);
  const cv::Mat decoded = cv::imread((dir.path() / "red.png").string(), cv::IMREAD_COLOR);
  ASSERT_FALSE(decoded.empty());
  // OpenCV decodes to BGR.
  EXPECT_EQ(decoded.at<cv::Vec3b>(0, 0)[2], 255);
  EXPECT_EQ(decoded.at<cv::Vec3b>(0, 0)[0], 0);
}

TEST(DatasetIo, DisparityDecodesRawOver256) {
  TempDir dir;
  cv::Mat raw(2, 3, CV_16UC1, cv::Scalar(0));
  raw.at<std::uint16_t>(0, 0) = 12800;
  raw.at<std::uint16_t>(1, 2) = 1;
  ASSERT_TRUE(cv::imwrite((dir.path() / "d.png").string(), raw));
  const DisparityMap d = load_disparity(dir.path() / "d.png");
  ASSERT_EQ(d.width(), 3);
  ASSERT_EQ(d.height(), 2);
  EXPECT_EQ(d.at(0, 0), 50.0);
  EXPECT_EQ(d.at(2, 1), 1.0 / 256.0);
  EXPECT_FALSE(d.valid(1, 0));
}

TEST(DisparityEncoding, InvalidStaysInvalidAndTinyStaysValid) {
  TempDir dir;
  DisparityMap d(4, 1);
  d.at(0, 0) = 0.0;
  d.at(1, 0) = -3.0;
  d.at(2, 0) = 1e-6;
  d.at(3, 0) = 255.99;
  save_disparity(dir.path() / "d.png", d);
  const DisparityMap back = load_disparity(dir.path() / "d.png");
  EXPECT_FALSE(back.valid(0, 0));
  EXPECT_FALSE(back.valid(1, 0));
  EXPECT_TRUE(back.valid(2, 0));
  EXPECT_EQ(back.at(2, 0), 1.0 / 256.0);
  EXPECT_NEAR(back.at(3, 0), 255.99, 1.0 / 512);

  d.at(3, 0) = 256.0;
  error_message(ErrorCode::kInvalidArgument, [&] { save_disparity(dir.path() / "e.png", d); });
  EXPECT_FALSE(fs::exists(dir.path() / "e.png"));
}

TEST(DatasetIo, MaskWithWrongHeightNamesFile) {
  TempDir dir;
  const StereoSample sample = make_sample("a", 8, 6, 2);
  save_sample(dir.path(), sample);
  save_mask(dir.path() / kMaskDir / "a.png", BinaryMask(8, 5));
  const std::string msg =
      error_message(ErrorCode::kDimensionMismatch, [&] { load_sample(dir.path(), "a"); });
  EXPECT_NE(msg.find((fs::path(kMaskDir) / "a.png").string()), std::string::npos) << msg;
}

TEST(DatasetIo, MissingAndMalformedFiles) {
  TempDir dir;
  const std::string missing = error_message(
      ErrorCode::kMissingFile, [&] { load_image(dir.path() / "nope.png"); });
  EXPECT_NE(missing.find("nope.png"), std::string::npos);

  write_file_atomic(dir.path() / "junk.png", "definitely not a png");
  error_message(ErrorCode::kMalformedFile, [&] { load_image(dir.path() / "junk.png"); });
  error_message(ErrorCode::kMalformedFile, [&] { load_disparity(dir.path() / "junk.png"); });

  // An 8-bit image is not a valid disparity map.
  save_image(dir.path() / "eight.png", Image(3, 3, 1, std::uint8_t{4}));
  error_message(ErrorCode::kMalformedFile, [&] { load_disparity(dir.path() / "eight.png"); });
  // A color image is not a valid mask.
  save_image(dir.path() / "rgb.png", Image(3, 3, 3, std::uint8_t{4}));
  error_message(ErrorCode::kMalformedFile, [&] { load_mask(dir.path() / "rgb.png"); });
}

TEST(DatasetIo, SaveSampleRefusesToClobber) {
  TempDir dir;
  const StereoSample first = make_sample("x", 6, 6, 3);
  save_sample(dir.path(), first);
  const std::string before = read_file(dir.path() / kRefDir / "x.png");
  error_message(ErrorCode::kDuplicateId,
                [&] { save_sample(dir.path(), make_sample("x", 6, 6, 4)); });
  EXPECT_EQ(read_file(dir.path() / kRefDir / "x.png"), before);
  save_sample(dir.path(), make_sample("x", 6, 6, 4), true);
  EXPECT_NE(read_file(dir.path() / kRefDir / "x.png"), before);
}

AugmentedSample make_augmented(const std::string& id, std::uint64_t seed) {
  const StereoSample s = make_sample(id, 12, 9, seed);
  return augment_sample(s, FitResult{RoadProjectionModel(0.0, 0.5, -2.0), 0.0, 10});
}

TEST(SaveAugmented, WritesTwoFilesAndOneManifestLine) {
  TempDir dir;
  const AugmentedSample aug = make_augmented("000001", 5);
  const SavedPaths paths = save_augmented(dir.path(), aug);
  EXPECT_EQ(paths.image, dir.path() / kRefDir / "000001_gen.png");
  EXPECT_EQ(paths.label, dir.path() / kMaskDir / "000001_gen.png");
  EXPECT_EQ(load_image(paths.image), aug.generated_image);
  EXPECT_EQ(load_mask(paths.label), aug.label);

  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) files += e.is_regular_file();
  EXPECT_EQ(files, 3u);

  const auto lines = read_lines(dir.path() / kManifestFile);
  ASSERT_EQ(lines.size(), 1u);
  const auto entry = nlohmann::json::parse(lines[0]);
  EXPECT_EQ(entry["sample_id"], "000001_gen");
  EXPECT_EQ(entry["source_id"], "000001");
  EXPECT_EQ(entry["reference"], "image_2/000001");
  EXPECT_EQ(entry["target"], "image_3/000001");
  EXPECT_EQ(entry["files"]["image"], "image_2/000001_gen.png");
  EXPECT_EQ(entry["files"]["label"], "gt_mask/000001_gen.png");

  save_augmented(dir.path(), make_augmented("000002", 6));
  EXPECT_EQ(read_lines(dir.path() / kManifestFile).size(), 2u);
}

TEST(SaveAugmented, DuplicateWithoutOverwriteClobbersNothing) {
  TempDir dir;
  save_augmented(dir.path(), make_augmented("s", 7));
  const std::string image = read_file(dir.path() / kRefDir / "s_gen.png");
  const std::string manifest = read_file(dir.path() / kManifestFile);
  error_message(ErrorCode::kDuplicateId,
                [&] { save_augmented(dir.path(), make_augmented("s", 8)); });
  EXPECT_EQ(read_file(dir.path() / kRefDir / "s_gen.png"), image);
  EXPECT_EQ(read_file(dir.path() / kManifestFile), manifest);

  // Stray output without a manifest entry is also protected.
  fs::remove(dir.path() / kManifestFile);
  error_message(ErrorCode::kDuplicateId,
                [&] { save_augmented(dir.path(), make_augmented("s", 8)); });
}

TEST(SaveAugmented, OverwriteIsIdempotent) {
  TempDir dir;
  const AugmentedSample aug = make_augmented("s", 9);
  save_augmented(dir.path(), aug);
  save_augmented(dir.path(), make_augmented("t", 10));
  const std::string image = read_file(dir.path() / kRefDir / "s_gen.png");
  const std::string label = read_file(dir.path() / kMaskDir / "s_gen.png");
  const std::string manifest = read_file(dir.path() / kManifestFile);
  save_augmented(dir.path(), aug, true);
  EXPECT_EQ(read_file(dir.path() / kRefDir / "s_gen.png"), image);
  EXPECT_EQ(read_file(dir.path() / kMaskDir / "s_gen.png"), label);
  EXPECT_EQ(read_file(dir.path() / kManifestFile), manifest);
}

TEST(ScanManifest, FlagsIncompleteSamples) {
  TempDir dir;
  for (const char* id : {"000003", "000001", "000002"}) save_sample(dir.path(), make_sample(id, 4, 4, 11));
  save_image(dir.path() / kRefDir / "000000.png", Image(4, 4, 3));
  save_mask(dir.path() / kMaskDir / "000000.png", BinaryMask(4, 4));

  const auto entries = scan_manifest(dir.path());
  ASSERT_EQ(entries.size(), 4u);
  EXPECT_EQ(entries[0].sample_id, "000000");
  EXPECT_FALSE(entries[0].complete());
  EXPECT_EQ(entries[0].missing(), (std::vector<std::string>{"image_3", "disp"}));
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_EQ(entries[i].sample_id, "00000" + std::to_string(i));
    EXPECT_TRUE(entries[i].complete());
  }
  const auto again = scan_manifest(dir.path());
  ASSERT_EQ(again.size(), entries.size());
  for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i].sample_id, entries[i].sample_id);
}

TEST(ScanManifest, EmptyAndMissingRoots) {
  TempDir dir;
  EXPECT_TRUE(scan_manifest(dir.path()).empty());
  error_message(ErrorCode::kIo, [&] { scan_manifest(dir.path() / "absent"); });
}

TEST(WriteFileAtomic, LeavesNoTemporaries) {
  TempDir dir;
  write_file_atomic(dir.path() / "sub" / "f.txt", "hello");
  write_file_atomic(dir.path() / "sub" / "f.txt", "world");
  EXPECT_EQ(read_file(dir.path() / "sub" / "f.txt"), "world");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir.path() / "sub")) files += e.is_regular_file();
  EXPECT_EQ(files, 1u);
}

}  // namespace
}  // namespace dsgen
