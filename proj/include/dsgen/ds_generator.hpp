#pragma once

// Reference-view image synthesis from the target view of a stereo pair.
//
// Every output pixel p = (u, v) is either copied from the reference image or
// sampled from the target image at column u - d(p), where d is the road
// model disparity. The shift is purely horizontal, so output row v only reads
// row v of either input.
//
// The warp is exact only on the road plane. Off-plane content (cars,
// buildings, sky) is displaced inconsistently with the reference label; the
// label is still reused unchanged for the generated image.

#include <cstddef>
#include <string>

#include "dsgen/camera_geometry.hpp"
#include "dsgen/plane_fit.hpp"
#include "dsgen/raster.hpp"

namespace dsgen {

enum class Interpolation { kBilinear, kNearest };

struct BranchCounts {
  std::size_t reference_copied = 0;
  std::size_t target_sampled = 0;
};

struct GeneratedView {
  Image image;
  /// true where the pixel came from the target image.
  BinaryMask target_branch;
  BranchCounts counts;
};

/// Source column u - d(u, v) is used when it is inside (0, W] and the
/// interpolation footprint lies within [0, W - 1]; otherwise the reference
/// pixel is copied. For bilinear sampling the footprint is
/// [floor(x), floor(x) + 1], collapsing to floor(x) when x is integral.
///
/// Throws kShapeMismatch if the images differ in size or channel count and
/// kDegenerateGeometry if the source column is not strictly increasing in u
/// (1 + gain sin(roll) <= 0).
GeneratedView generate_view_detailed(const Image& ref_img, const Image& tgt_img,
                                     const RoadProjectionModel& model,
                                     Interpolation interpolation = Interpolation::kBilinear);

Image generate_view(const Image& ref_img, const Image& tgt_img, const RoadProjectionModel& model,
                    Interpolation interpolation = Interpolation::kBilinear);

struct AugmentedSample {
  std::string sample_id;
  Image generated_image;
  BinaryMask label;
  std::string reference_id;
  std::string target_id;
  RoadProjectionModel model;
  BranchCounts counts;
};

/// Generates the reference-view image of `sample` and pairs it with a copy of
/// the reference road label.
AugmentedSample augment_sample(const StereoSample& sample, const FitResult& fit,
                               Interpolation interpolation = Interpolation::kBilinear);

}  // namespace dsgen
