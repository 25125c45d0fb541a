#include "dsgen/synthetic_scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "dsgen/error.hpp"

namespace dsgen {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform in [0, 1) from the raw engine output; independent of the
// library's distribution implementations.
double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1p-53;
}

double standard_normal(std::mt19937_64& engine) {
  const double u1 = 1.0 - unit_uniform(engine);
  const double u2 = unit_uniform(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

class PlaneTexture {
 public:
  PlaneTexture(const PlaneParams& plane, const TextureSpec& spec, int channels)
      : spec_(spec), channels_(channels) {
    if (!(spec.period_m > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "texture period must be positive");
    }
    // In-plane orthonormal basis.
    const Eigen::Vector3d& n = plane.normal();
    Eigen::Vector3d seed_axis = Eigen::Vector3d::UnitX();
    if (std::abs(n.dot(seed_axis)) > 0.9) seed_axis = Eigen::Vector3d::UnitZ();
    e1_ = (seed_axis - seed_axis.dot(n) * n).normalized();
    e2_ = n.cross(e1_);

    std::mt19937_64 engine(spec.seed);
    const double theta1 = 0.3 + 0.4 * unit_uniform(engine);
    const double theta2 = 1.9 + 0.4 * unit_uniform(engine);
    const double p1 = spec.period_m;
    const double p2 = spec.period_m * 1.618;
    k1_ = {std::cos(theta1) / p1, std::sin(theta1) / p1};
    k2_ = {std::cos(theta2) / p2, std::sin(theta2) / p2};
    for (int c = 0; c < 3; ++c) {
      phase1_[c] = kTwoPi * unit_uniform(engine);
      phase2_[c] = kTwoPi * unit_uniform(engine);
    }
  }

  void shade(const Eigen::Vector3d& point, std::uint8_t* pixel) const {
    const double s = point.dot(e1_);
    const double t = point.dot(e2_);
    if (spec_.kind == TextureKind::kCheckerboard) {
      const auto cell = static_cast<long long>(std::floor(s / spec_.period_m)) +
                        static_cast<long long>(std::floor(t / spec_.period_m));
      for (int c = 0; c < channels_; ++c) {
        pixel[c] = static_cast<std::uint8_t>((cell & 1) ? 200 - 20 * c : 55 + 20 * c);
      }
      return;
    }
    const double a1 = kTwoPi * (k1_[0] * s + k1_[1] * t);
    const double a2 = kTwoPi * (k2_[0] * s + k2_[1] * t);
    for (int c = 0; c < channels_; ++c) {
      const double value = 128.0 + 55.0 * std::sin(a1 + phase1_[c]) + 35.0 * std::sin(a2 + phase2_[c]);
      pixel[c] = static_cast<std::uint8_t>(std::floor(value + 0.5));
    }
  }

 private:
  TextureSpec spec_;
  int channels_;
  Eigen::Vector3d e1_;
  Eigen::Vector3d e2_;
  std::array<double, 2> k1_{};
  std::array<double, 2> k2_{};
  std::array<double, 3> phase1_{};
  std::array<double, 3> phase2_{};
};

}  // namespace

std::optional<double> ground_truth_disparity(const StereoRig& rig, const PlaneParams& plane,
                                             Pixel p, double max_depth) {
  const auto& k = rig.intrinsics();
  const Eigen::Vector3d& n = plane.normal();
  // n . ray * f, with ray = ((u - o_u)/f, (v - o_v)/f, 1).
  const double facing = n.x() * (p.u - k.o_u()) + n.y() * (p.v - k.o_v()) + k.f() * n.z();
  if (!(facing > 0.0)) return std::nullopt;
  const double depth = plane.distance() * k.f() / facing;
  if (!(depth <= max_depth)) return std::nullopt;
  return rig.baseline() * facing / plane.distance();
}

StereoSample render_planar_scene(const SyntheticScene& scene) {
  if (scene.width < 1 || scene.height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "scene dimensions must be positive");
  }
  if (scene.channels != 1 && scene.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "scene channels must be 1 or 3");
  }
  if (!(scene.max_depth > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_depth must be positive");
  }
  if (!(scene.disparity_noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "disparity noise sigma must be non-negative");
  }
  const auto& k = scene.rig.intrinsics();
  const Eigen::Vector3d& n = scene.plane.normal();
  const double baseline = scene.rig.baseline();
  // Distance from the target camera center (T_c, 0, 0) to the plane.
  const double target_distance = scene.plane.distance() - baseline * n.x();
  if (!(target_distance > 0.0)) {
    throw Error(ErrorCode::kDegenerateScene, "target camera lies on or behind the road plane");
  }

  const PlaneTexture texture(scene.plane, scene.texture, scene.channels);
  StereoSample sample{scene.sample_id,
                      Image(scene.width, scene.height, scene.channels, scene.background),
                      Image(scene.width, scene.height, scene.channels, scene.background),
                      DisparityMap(scene.width, scene.height),
                      BinaryMask(scene.width, scene.height)};

  const Eigen::Vector3d target_center(baseline, 0.0, 0.0);
  for (int v = 0; v < scene.height; ++v) {
    for (int u = 0; u < scene.width; ++u) {
      const Eigen::Vector3d ray((u - k.o_u()) / k.f(), (v - k.o_v()) / k.f(), 1.0);
      const double facing = n.dot(ray);
      if (!(facing > 0.0)) continue;

      const double ref_depth = scene.plane.distance() / facing;
      if (ref_depth <= scene.max_depth) {
        texture.shade(ref_depth * ray, &sample.ref_image.at(u, v));
        if (auto d = ground_truth_disparity(scene.rig, scene.plane, {double(u), double(v)},
                                            scene.max_depth)) {
          sample.disparity.at(u, v) = *d;
          sample.road_mask.set(u, v, true);
        }
      }
      const double tgt_depth = target_distance / facing;
      if (tgt_depth <= scene.max_depth) {
        texture.shade(target_center + tgt_depth * ray, &sample.tgt_image.at(u, v));
      }
    }
  }
  if (sample.road_mask.count() == 0) {
    throw Error(ErrorCode::kDegenerateScene, "the plane is not visible within max_depth");
  }

  if (scene.disparity_noise_sigma > 0.0) {
    std::mt19937_64 engine(scene.texture.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int v = 0; v < scene.height; ++v) {
      for (int u = 0; u < scene.width; ++u) {
        if (!sample.road_mask.at(u, v)) continue;
        double& d = sample.disparity.at(u, v);
        d = std::max(d + scene.disparity_noise_sigma * standard_normal(engine), 1.0 / 256.0);
      }
    }
  }
  return sample;
}

}  // namespace dsgen
