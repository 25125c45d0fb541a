#include "dsgen/raster.hpp"

#include <algorithm>
#include <cmath>

#include "dsgen/error.hpp"

namespace dsgen {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be at least 1x1");
  }
}

}  // namespace

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "images must have 1 or 3 channels");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : Image(width, height, channels) {
  if (data.size() != data_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "image buffer length does not match dimensions");
  }
  data_ = std::move(data);
}

DisparityMap::DisparityMap(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

bool DisparityMap::valid(int u, int v) const {
  const double d = at(u, v);
  return std::isfinite(d) && d > 0.0;
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void validate_sample(const StereoSample& sample) {
  const int w = sample.ref_image.width();
  const int h = sample.ref_image.height();
  auto check = [&](int ow, int oh, const char* what) {
    if (ow != w || oh != h) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(what) + " dimensions differ from the reference image in sample '" +
                      sample.sample_id + "'");
    }
  };
  check(sample.tgt_image.width(), sample.tgt_image.height(), "target image");
  check(sample.disparity.width(), sample.disparity.height(), "disparity map");
  check(sample.road_mask.width(), sample.road_mask.height(), "road mask");
}

}  // namespace dsgen
