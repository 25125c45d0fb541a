#pragma once

// Ray-cast renderer for a textured plane seen by a rectified stereo rig.
// Produces a StereoSample with exact disparities and road mask, used as the
// ground truth for fitting and view generation.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "dsgen/camera_geometry.hpp"
#include "dsgen/raster.hpp"

namespace dsgen {

enum class TextureKind {
  /// Two superposed non-axis-aligned sinusoids; band-limited, safe to
  /// interpolate.
  kSinusoid,
  /// Hard-edged squares; aliases, meant for eyeballing only.
  kCheckerboard,
};

struct TextureSpec {
  TextureKind kind = TextureKind::kSinusoid;
  /// Period of the primary sinusoid (or checker size), meters on the plane.
  double period_m = 1.0;
  std::uint64_t seed = 0;
};

struct SyntheticScene {
  StereoRig rig;
  PlaneParams plane;
  TextureSpec texture;
  int width = 1242;
  int height = 375;
  int channels = 3;
  std::uint8_t background = 0;
  double max_depth = 40.0;
  /// Standard deviation of Gaussian noise added to the stored disparities.
  double disparity_noise_sigma = 0.0;
  std::string sample_id = "000000";
};

/// d = T_c (n_x (u - o_u) + n_y (v - o_v) + f n_z) / D when the pixel ray
/// meets the plane at depth z in (0, max_depth]; nullopt otherwise.
std::optional<double> ground_truth_disparity(
    const StereoRig& rig, const PlaneParams& plane, Pixel p,
    double max_depth = std::numeric_limits<double>::infinity());

/// Throws kDegenerateScene if no pixel sees the plane or the target camera
/// sits on the far side of the plane.
StereoSample render_planar_scene(const SyntheticScene& scene);

}  // namespace dsgen
