#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dsgen {

/// 8-bit interleaved raster, origin top-left, u = column, v = row.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0);
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t& at(int u, int v, int c = 0) { return data_[index(u, v, c)]; }
  std::uint8_t at(int u, int v, int c = 0) const { return data_[index(u, v, c)]; }

  std::span<std::uint8_t> row(int v) {
    return {data_.data() + static_cast<std::size_t>(v) * stride(), stride()};
  }
  std::span<const std::uint8_t> row(int v) const {
    return {data_.data() + static_cast<std::size_t>(v) * stride(), stride()};
  }

  std::size_t stride() const noexcept { return static_cast<std::size_t>(width_) * channels_; }
  const std::vector<std::uint8_t>& data() const noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int u, int v, int c) const {
    return (static_cast<std::size_t>(v) * width_ + u) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Real-valued disparities in pixels. Values <= 0 (or non-finite) are invalid.
class DisparityMap {
 public:
  DisparityMap() = default;
  DisparityMap(int width, int height, double fill = 0.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  double& at(int u, int v) { return values_[static_cast<std::size_t>(v) * width_ + u]; }
  double at(int u, int v) const { return values_[static_cast<std::size_t>(v) * width_ + u]; }
  bool valid(int u, int v) const;

  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const DisparityMap&, const DisparityMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

/// Road / not-road per pixel, stored as 0/1.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool at(int u, int v) const { return bits_[static_cast<std::size_t>(v) * width_ + u] != 0; }
  void set(int u, int v, bool road) {
    bits_[static_cast<std::size_t>(v) * width_ + u] = road ? 1 : 0;
  }
  std::size_t count() const;

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// One stereo pair with its disparity and road label. All rasters share
/// width and height.
struct StereoSample {
  std::string sample_id;
  Image ref_image;
  Image tgt_image;
  DisparityMap disparity;
  BinaryMask road_mask;
};

/// Throws kDimensionMismatch if the rasters disagree on size.
void validate_sample(const StereoSample& sample);

}  // namespace dsgen
