#pragma once

// On-disk sample layout (KITTI-style, shared file stems):
//
//   <root>/image_2/<id>.png   reference image, 8-bit RGB or gray
//   <root>/image_3/<id>.png   target image
//   <root>/disp/<id>.png      16-bit gray, disparity = raw / 256, raw 0 = invalid
//   <root>/gt_mask/<id>.png   8-bit gray, nonzero = road
//
// Augmented output goes to <out>/image_2/<id>_gen.png and
// <out>/gt_mask/<id>_gen.png, with one JSON line per sample appended to
// <out>/manifest.jsonl. Every write goes through a temporary file and a rename.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dsgen/ds_generator.hpp"
#include "dsgen/raster.hpp"

namespace dsgen {

namespace fs = std::filesystem;

inline constexpr std::string_view kRefDir = "image_2";
inline constexpr std::string_view kTgtDir = "image_3";
inline constexpr std::string_view kDispDir = "disp";
inline constexpr std::string_view kMaskDir = "gt_mask";
inline constexpr std::string_view kManifestFile = "manifest.jsonl";
inline constexpr std::string_view kGeneratedSuffix = "_gen";

/// Writes `bytes` to `path` via a sibling temporary file and rename. Creates
/// parent directories.
void write_file_atomic(const fs::path& path, std::string_view bytes);
std::string read_file(const fs::path& path);

Image load_image(const fs::path& path);
void save_image(const fs::path& path, const Image& image);

DisparityMap load_disparity(const fs::path& path);
/// Throws kInvalidArgument for disparities >= 256 (not representable).
/// Valid disparities below 1/512 are stored as raw 1 so they stay valid.
void save_disparity(const fs::path& path, const DisparityMap& disparity);

BinaryMask load_mask(const fs::path& path);
/// Road pixels are written as 255.
void save_mask(const fs::path& path, const BinaryMask& mask);

StereoSample load_sample(const fs::path& root, const std::string& sample_id);

/// Throws kDuplicateId if any of the four files exists and !overwrite.
void save_sample(const fs::path& root, const StereoSample& sample, bool overwrite = false);

struct SavedPaths {
  fs::path image;
  fs::path label;
};

/// Writes the generated image and copied label, then updates the manifest.
/// Without `overwrite`, an existing output or manifest entry for the same id
/// is a kDuplicateId error and nothing is written. With `overwrite`, the
/// manifest entry is replaced in place.
SavedPaths save_augmented(const fs::path& root, const AugmentedSample& aug,
                          bool overwrite = false);

struct ManifestEntry {
  std::string sample_id;
  bool has_reference = false;
  bool has_target = false;
  bool has_disparity = false;
  bool has_mask = false;

  bool complete() const { return has_reference && has_target && has_disparity && has_mask; }
  std::vector<std::string> missing() const;
};

/// Union of PNG stems across the four layout directories, sorted by byte
/// value of the id. Missing layout directories are treated as empty.
std::vector<ManifestEntry> scan_manifest(const fs::path& root);

}  // namespace dsgen
