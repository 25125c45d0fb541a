#include "dsgen/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <json.hpp>

#include "dsgen/error.hpp"

namespace dsgen {

namespace {

std::mutex manifest_mutex;

fs::path sample_file(const fs::path& root, std::string_view dir, const std::string& id) {
  return root / dir / (id + ".png");
}

cv::Mat decode_png(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  }
  const std::string bytes = read_file(path);
  const std::vector<uchar> buffer(bytes.begin(), bytes.end());
  cv::Mat mat;
  try {
    mat = cv::imdecode(buffer, cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception&) {
    mat.release();
  }
  if (mat.empty()) {
    throw Error(ErrorCode::kMalformedFile, "cannot decode image: " + path.string());
  }
  return mat;
}

void encode_png(const fs::path& path, const cv::Mat& mat) {
  std::vector<uchar> buffer;
  if (!cv::imencode(".png", mat, buffer)) {
    throw Error(ErrorCode::kIo, "PNG encoding failed for " + path.string());
  }
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(buffer.data()),
                                           buffer.size()));
}

// OpenCV keeps 3-channel images in BGR order.
void swap_red_blue(std::vector<std::uint8_t>& interleaved) {
  for (std::size_t i = 0; i + 2 < interleaved.size(); i += 3) std::swap(interleaved[i], interleaved[i + 2]);
}

std::string relative_string(const fs::path& path, const fs::path& root) {
  return path.lexically_relative(root).generic_string();
}

std::vector<nlohmann::json> read_manifest(const fs::path& path) {
  std::vector<nlohmann::json> entries;
  if (!fs::exists(path)) return entries;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      entries.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedFile, "bad manifest line in " + path.string() + ": " + e.what());
    }
  }
  return entries;
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory for " + path.string());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into place: " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open for reading: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Image load_image(const fs::path& path) {
  cv::Mat mat = decode_png(path);
  if (mat.depth() != CV_8U || (mat.channels() != 1 && mat.channels() != 3)) {
    throw Error(ErrorCode::kMalformedFile,
                "expected an 8-bit gray or RGB image: " + path.string());
  }
  std::vector<std::uint8_t> data(mat.total() * mat.channels());
  const std::size_t row_bytes = static_cast<std::size_t>(mat.cols) * mat.channels();
  for (int r = 0; r < mat.rows; ++r) {
    std::copy_n(mat.ptr<std::uint8_t>(r), row_bytes, data.begin() + r * row_bytes);
  }
  if (mat.channels() == 3) swap_red_blue(data);
  return Image(mat.cols, mat.rows, mat.channels(), std::move(data));
}

void save_image(const fs::path& path, const Image& image) {
  const int type = image.channels() == 3 ? CV_8UC3 : CV_8UC1;
  cv::Mat mat(image.height(), image.width(), type);
  std::vector<std::uint8_t> row_bgr(image.stride());
  for (int r = 0; r < image.height(); ++r) {
    const auto row = image.row(r);
    row_bgr.assign(row.begin(), row.end());
    if (image.channels() == 3) swap_red_blue(row_bgr);
    std::copy(row_bgr.begin(), row_bgr.end(), mat.ptr<std::uint8_t>(r));
  }
  encode_png(path, mat);
}

DisparityMap load_disparity(const fs::path& path) {
  const cv::Mat mat = decode_png(path);
  if (mat.depth() != CV_16U || mat.channels() != 1) {
    throw Error(ErrorCode::kMalformedFile,
                "expected a 16-bit single-channel disparity PNG: " + path.string());
  }
  DisparityMap map(mat.cols, mat.rows);
  for (int v = 0; v < mat.rows; ++v) {
    const auto* row = mat.ptr<std::uint16_t>(v);
    for (int u = 0; u < mat.cols; ++u) map.at(u, v) = row[u] / 256.0;
  }
  return map;
}

void save_disparity(const fs::path& path, const DisparityMap& disparity) {
  cv::Mat mat(disparity.height(), disparity.width(), CV_16UC1);
  for (int v = 0; v < disparity.height(); ++v) {
    auto* row = mat.ptr<std::uint16_t>(v);
    for (int u = 0; u < disparity.width(); ++u) {
      if (!disparity.valid(u, v)) {
        row[u] = 0;
        continue;
      }
      const double raw = std::floor(disparity.at(u, v) * 256.0 + 0.5);
      if (raw > 65535.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "disparity " + std::to_string(disparity.at(u, v)) +
                        " exceeds the 16-bit encoding range");
      }
      row[u] = static_cast<std::uint16_t>(std::max(raw, 1.0));
    }
  }
  encode_png(path, mat);
}

BinaryMask load_mask(const fs::path& path) {
  const cv::Mat mat = decode_png(path);
  if (mat.depth() != CV_8U || mat.channels() != 1) {
    throw Error(ErrorCode::kMalformedFile, "expected an 8-bit single-channel mask: " + path.string());
  }
  BinaryMask mask(mat.cols, mat.rows);
  for (int v = 0; v < mat.rows; ++v) {
    const auto* row = mat.ptr<std::uint8_t>(v);
    for (int u = 0; u < mat.cols; ++u) mask.set(u, v, row[u] != 0);
  }
  return mask;
}

void save_mask(const fs::path& path, const BinaryMask& mask) {
  cv::Mat mat(mask.height(), mask.width(), CV_8UC1);
  for (int v = 0; v < mask.height(); ++v) {
    auto* row = mat.ptr<std::uint8_t>(v);
    for (int u = 0; u < mask.width(); ++u) row[u] = mask.at(u, v) ? 255 : 0;
  }
  encode_png(path, mat);
}

StereoSample load_sample(const fs::path& root, const std::string& sample_id) {
  StereoSample sample;
  sample.sample_id = sample_id;
  const fs::path ref_path = sample_file(root, kRefDir, sample_id);
  sample.ref_image = load_image(ref_path);
  const int w = sample.ref_image.width();
  const int h = sample.ref_image.height();
  auto check = [&](int ow, int oh, const fs::path& path) {
    if (ow != w || oh != h) {
      throw Error(ErrorCode::kDimensionMismatch,
                  path.string() + " is " + std::to_string(ow) + "x" + std::to_string(oh) +
                      " but " + ref_path.string() + " is " + std::to_string(w) + "x" +
                      std::to_string(h));
    }
  };
  const fs::path tgt_path = sample_file(root, kTgtDir, sample_id);
  sample.tgt_image = load_image(tgt_path);
  check(sample.tgt_image.width(), sample.tgt_image.height(), tgt_path);
  if (sample.tgt_image.channels() != sample.ref_image.channels()) {
    throw Error(ErrorCode::kDimensionMismatch,
                tgt_path.string() + " has a different channel count than " + ref_path.string());
  }
  const fs::path disp_path = sample_file(root, kDispDir, sample_id);
  sample.disparity = load_disparity(disp_path);
  check(sample.disparity.width(), sample.disparity.height(), disp_path);
  const fs::path mask_path = sample_file(root, kMaskDir, sample_id);
  sample.road_mask = load_mask(mask_path);
  check(sample.road_mask.width(), sample.road_mask.height(), mask_path);
  return sample;
}

void save_sample(const fs::path& root, const StereoSample& sample, bool overwrite) {
  validate_sample(sample);
  const fs::path ref = sample_file(root, kRefDir, sample.sample_id);
  const fs::path tgt = sample_file(root, kTgtDir, sample.sample_id);
  const fs::path disp = sample_file(root, kDispDir, sample.sample_id);
  const fs::path mask = sample_file(root, kMaskDir, sample.sample_id);
  if (!overwrite) {
    for (const auto& p : {ref, tgt, disp, mask}) {
      if (fs::exists(p)) {
        throw Error(ErrorCode::kDuplicateId, "refusing to overwrite " + p.string());
      }
    }
  }
  save_image(ref, sample.ref_image);
  save_image(tgt, sample.tgt_image);
  save_disparity(disp, sample.disparity);
  save_mask(mask, sample.road_mask);
}

SavedPaths save_augmented(const fs::path& root, const AugmentedSample& aug, bool overwrite) {
  const std::string gen_id = aug.sample_id + std::string(kGeneratedSuffix);
  const SavedPaths paths{sample_file(root, kRefDir, gen_id), sample_file(root, kMaskDir, gen_id)};
  const fs::path manifest_path = root / kManifestFile;

  std::lock_guard lock(manifest_mutex);
  std::vector<nlohmann::json> entries = read_manifest(manifest_path);
  auto existing = std::find_if(entries.begin(), entries.end(), [&](const nlohmann::json& e) {
    return e.value("sample_id", "") == gen_id;
  });
  if (!overwrite) {
    if (existing != entries.end()) {
      throw Error(ErrorCode::kDuplicateId, "manifest already lists " + gen_id);
    }
    for (const auto& p : {paths.image, paths.label}) {
      if (fs::exists(p)) throw Error(ErrorCode::kDuplicateId, "refusing to overwrite " + p.string());
    }
  }

  save_image(paths.image, aug.generated_image);
  save_mask(paths.label, aug.label);

  nlohmann::json entry = {
      {"sample_id", gen_id},
      {"source_id", aug.sample_id},
      {"reference", aug.reference_id},
      {"target", aug.target_id},
      {"files", {{"image", relative_string(paths.image, root)},
                 {"label", relative_string(paths.label, root)}}},
      {"complete", true},
  };
  if (existing != entries.end()) {
    *existing = std::move(entry);
  } else {
    entries.push_back(std::move(entry));
  }
  std::string text;
  for (const auto& e : entries) text += e.dump() + "\n";
  write_file_atomic(manifest_path, text);
  return paths;
}

std::vector<std::string> ManifestEntry::missing() const {
  std::vector<std::string> out;
  if (!has_reference) out.emplace_back(kRefDir);
  if (!has_target) out.emplace_back(kTgtDir);
  if (!has_disparity) out.emplace_back(kDispDir);
  if (!has_mask) out.emplace_back(kMaskDir);
  return out;
}

std::vector<ManifestEntry> scan_manifest(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::kIo, "cannot read dataset root: " + root.string());
  }
  std::map<std::string, ManifestEntry> by_id;
  auto collect = [&](std::string_view dir, bool ManifestEntry::*flag) {
    const fs::path sub = root / dir;
    if (!fs::is_directory(sub, ec)) return;
    for (const auto& item : fs::directory_iterator(sub)) {
      if (!item.is_regular_file() || item.path().extension() != ".png") continue;
      const std::string id = item.path().stem().string();
      auto& entry = by_id[id];
      entry.sample_id = id;
      entry.*flag = true;
    }
  };
  collect(kRefDir, &ManifestEntry::has_reference);
  collect(kTgtDir, &ManifestEntry::has_target);
  collect(kDispDir, &ManifestEntry::has_disparity);
  collect(kMaskDir, &ManifestEntry::has_mask);

  std::vector<ManifestEntry> entries;
  entries.reserve(by_id.size());
  for (auto& [id, entry] : by_id) entries.push_back(std::move(entry));
  return entries;
}

}  // namespace dsgen
