#pragma once

// Pinhole/plane algebra for a rectified stereo rig: intrinsics, plane-induced
// homographies and the road disparity projection model
//
//   d(u, v) = gain * (v cos(roll) - u sin(roll) + offset)
//
// which is the first row of the stereo homography rewritten in terms of a
// roll angle, a gain and an offset.

#include <string>

#include <Eigen/Core>

namespace dsgen {

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

class CameraIntrinsics {
 public:
  CameraIntrinsics(double f, double o_u, double o_v);

  double f() const noexcept { return f_; }
  double o_u() const noexcept { return o_u_; }
  double o_v() const noexcept { return o_v_; }

  /// [[f, 0, o_u], [0, f, o_v], [0, 0, 1]]
  Eigen::Matrix3d matrix() const;
  Eigen::Matrix3d inverse_matrix() const;

 private:
  double f_;
  double o_u_;
  double o_v_;
};

/// Rectified rig: R = I, t = (baseline, 0, 0), both cameras share intrinsics.
class StereoRig {
 public:
  StereoRig(CameraIntrinsics intrinsics, double baseline_tc);

  const CameraIntrinsics& intrinsics() const noexcept { return intrinsics_; }
  double baseline() const noexcept { return baseline_; }

 private:
  CameraIntrinsics intrinsics_;
  double baseline_;
};

/// Plane n.P = D in the reference camera frame (x right, y down, z forward).
///
/// Canonical form: |n| = 1 and D > 0. A normal of any length is accepted and
/// rescaled together with D; a negative D flips both. Planes with n_y < 0
/// after that (surfaces above the camera) have no road orientation and are
/// rejected, as are planes through the camera center.
class PlaneParams {
 public:
  PlaneParams(const Eigen::Vector3d& normal, double distance);

  const Eigen::Vector3d& normal() const noexcept { return normal_; }
  double distance() const noexcept { return distance_; }

 private:
  Eigen::Vector3d normal_;
  double distance_;
};

class RoadProjectionModel {
 public:
  RoadProjectionModel(double roll_phi, double gain_varkappa, double offset_kappa);

  double roll() const noexcept { return roll_; }
  double gain() const noexcept { return gain_; }
  double offset() const noexcept { return offset_; }

 private:
  double roll_;
  double gain_;
  double offset_;
};

/// 3x3 map from reference-view homogeneous pixels to target-view ones.
/// Stored scale-normalized (bottom-right entry 1 when nonzero).
class Homography {
 public:
  explicit Homography(const Eigen::Matrix3d& entries);

  const Eigen::Matrix3d& matrix() const noexcept { return entries_; }
  double operator()(int row, int col) const { return entries_(row, col); }

 private:
  Eigen::Matrix3d entries_;
};

/// depth_ratio * K_tgt * (R - t n^T / D) * K_ref^-1. The scalar depth ratio
/// only scales the matrix, so it vanishes under normalization; it is kept so
/// the call mirrors the general two-view formula.
Homography homography_general(const CameraIntrinsics& k_ref, const CameraIntrinsics& k_tgt,
                              const Eigen::Matrix3d& rotation,
                              const Eigen::Vector3d& translation, const PlaneParams& plane,
                              double depth_ratio = 1.0);

Homography homography_stereo(const StereoRig& rig, const PlaneParams& plane);

/// [[1 + k sin(phi), -k cos(phi), -k*kappa], [0, 1, 0], [0, 0, 1]]
Homography homography_from_model(const RoadProjectionModel& model);

RoadProjectionModel plane_to_model(const StereoRig& rig, const PlaneParams& plane);

/// Inverse of plane_to_model. Only models with positive gain correspond to a
/// canonical (n_y > 0) plane.
PlaneParams model_to_plane(const StereoRig& rig, const RoadProjectionModel& model);

/// v cos(phi) - u sin(phi)
double w_transform(Pixel p, double phi);

double model_disparity(const RoadProjectionModel& model, Pixel p);

Pixel apply_homography(const Homography& h, Pixel p);

/// Row-major, 17 significant digits, one row per line.
std::string format_matrix(const Homography& h);

}  // namespace dsgen
