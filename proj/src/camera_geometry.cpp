#include "dsgen/camera_geometry.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/LU>

#include "dsgen/error.hpp"

namespace dsgen {

namespace {

constexpr double kSingularDet = 1e-12;
constexpr double kUnitTolerance = 1e-12;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be finite");
  }
}

}  // namespace

CameraIntrinsics::CameraIntrinsics(double f, double o_u, double o_v) : f_(f), o_u_(o_u), o_v_(o_v) {
  require_finite(f, "focal length");
  require_finite(o_u, "o_u");
  require_finite(o_v, "o_v");
  if (f <= 0.0) throw Error(ErrorCode::kInvalidArgument, "focal length must be positive");
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << f_, 0.0, o_u_,
       0.0, f_, o_v_,
       0.0, 0.0, 1.0;
  return k;
}

Eigen::Matrix3d CameraIntrinsics::inverse_matrix() const {
  Eigen::Matrix3d k_inv;
  k_inv << 1.0 / f_, 0.0, -o_u_ / f_,
           0.0, 1.0 / f_, -o_v_ / f_,
           0.0, 0.0, 1.0;
  return k_inv;
}

StereoRig::StereoRig(CameraIntrinsics intrinsics, double baseline_tc)
    : intrinsics_(intrinsics), baseline_(baseline_tc) {
  require_finite(baseline_tc, "baseline");
  if (baseline_tc <= 0.0) throw Error(ErrorCode::kInvalidArgument, "baseline must be positive");
}

PlaneParams::PlaneParams(const Eigen::Vector3d& normal, double distance) {
  if (!normal.allFinite()) throw Error(ErrorCode::kInvalidArgument, "plane normal must be finite");
  require_finite(distance, "plane distance");
  const double norm = normal.norm();
  if (norm <= 0.0) throw Error(ErrorCode::kInvalidArgument, "plane normal must be nonzero");
  normal_ = normal / norm;
  distance_ = distance / norm;
  if (distance_ == 0.0) {
    throw Error(ErrorCode::kDegeneratePlane, "plane passes through the reference camera center");
  }
  if (distance_ < 0.0) {
    normal_ = -normal_;
    distance_ = -distance_;
  }
  if (normal_.y() < 0.0) {
    if (normal_.y() < -kUnitTolerance) {
      throw Error(ErrorCode::kDegeneratePlane,
                  "plane lies above the camera (n_y < 0 with D > 0); not a road surface");
    }
    normal_.y() = 0.0;
  }
}

RoadProjectionModel::RoadProjectionModel(double roll_phi, double gain_varkappa,
                                         double offset_kappa)
    : roll_(roll_phi), gain_(gain_varkappa), offset_(offset_kappa) {
  if (!std::isfinite(roll_phi) || !std::isfinite(gain_varkappa) || !std::isfinite(offset_kappa)) {
    throw Error(ErrorCode::kInvalidModel, "model parameters must be finite");
  }
  if (!(std::abs(roll_phi) < std::numbers::pi / 2)) {
    throw Error(ErrorCode::kInvalidModel, "roll angle must lie in (-pi/2, pi/2)");
  }
}

Homography::Homography(const Eigen::Matrix3d& entries) : entries_(entries) {
  if (!entries_.allFinite()) throw Error(ErrorCode::kDegenerateGeometry, "non-finite homography");
  if (entries_(2, 2) != 0.0) entries_ /= entries_(2, 2);
  if (std::abs(entries_.determinant()) <= kSingularDet) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "singular homography (plane contains a camera center)");
  }
}

Homography homography_general(const CameraIntrinsics& k_ref, const CameraIntrinsics& k_tgt,
                              const Eigen::Matrix3d& rotation,
                              const Eigen::Vector3d& translation, const PlaneParams& plane,
                              double depth_ratio) {
  if (!rotation.allFinite() ||
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() >
          1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "rotation must be orthonormal");
  }
  if (!translation.allFinite()) throw Error(ErrorCode::kInvalidArgument, "translation must be finite");
  if (!std::isfinite(depth_ratio) || depth_ratio <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "depth ratio must be positive");
  }
  const Eigen::Matrix3d euclidean =
      rotation - translation * plane.normal().transpose() / plane.distance();
  return Homography(depth_ratio * k_tgt.matrix() * euclidean * k_ref.inverse_matrix());
}

Homography homography_stereo(const StereoRig& rig, const PlaneParams& plane) {
  const auto& k = rig.intrinsics();
  const Eigen::Vector3d& n = plane.normal();
  const double s = rig.baseline() / plane.distance();
  Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
  h(0, 0) = 1.0 - s * n.x();
  h(0, 1) = -s * n.y();
  h(0, 2) = k.o_u() * s * n.x() + k.o_v() * s * n.y() - k.f() * s * n.z();
  return Homography(h);
}

Homography homography_from_model(const RoadProjectionModel& model) {
  const double k = model.gain();
  if (k == 0.0) throw Error(ErrorCode::kInvalidModel, "model gain must be nonzero");
  Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
  h(0, 0) = 1.0 + k * std::sin(model.roll());
  h(0, 1) = -k * std::cos(model.roll());
  h(0, 2) = -k * model.offset();
  return Homography(h);
}

RoadProjectionModel plane_to_model(const StereoRig& rig, const PlaneParams& plane) {
  const auto& k = rig.intrinsics();
  const Eigen::Vector3d& n = plane.normal();
  const double in_image_plane = std::hypot(n.x(), n.y());
  if (in_image_plane <= kUnitTolerance || n.y() <= 0.0) {
    throw Error(ErrorCode::kDegeneratePlane,
                "roll angle undefined: plane normal has no positive image-vertical component");
  }
  const double gain = rig.baseline() * in_image_plane / plane.distance();
  const double offset =
      (k.f() * n.z() - k.o_u() * n.x() - k.o_v() * n.y()) * rig.baseline() / (plane.distance() * gain);
  return RoadProjectionModel(std::atan2(-n.x(), n.y()), gain, offset);
}

PlaneParams model_to_plane(const StereoRig& rig, const RoadProjectionModel& model) {
  if (model.gain() == 0.0) throw Error(ErrorCode::kInvalidModel, "model gain must be nonzero");
  const auto& k = rig.intrinsics();
  // Plane scaled to D = 1: (n_x, n_y) = (gain / T_c) * (-sin, cos).
  const double a = model.gain() / rig.baseline();
  const double nx = -a * std::sin(model.roll());
  const double ny = a * std::cos(model.roll());
  const double nz = (a * model.offset() + k.o_u() * nx + k.o_v() * ny) / k.f();
  const Eigen::Vector3d n(nx, ny, nz);
  if (!n.allFinite() || n.norm() == 0.0) {
    throw Error(ErrorCode::kDegenerateGeometry, "reconstructed plane normal is not normalizable");
  }
  return PlaneParams(n, 1.0);
}

double w_transform(Pixel p, double phi) { return p.v * std::cos(phi) - p.u * std::sin(phi); }

double model_disparity(const RoadProjectionModel& model, Pixel p) {
  return model.gain() * (w_transform(p, model.roll()) + model.offset());
}

Pixel apply_homography(const Homography& h, Pixel p) {
  const Eigen::Vector3d q = h.matrix() * Eigen::Vector3d(p.u, p.v, 1.0);
  if (std::abs(q.z()) <= 1e-12) {
    throw Error(ErrorCode::kPointAtInfinity, "pixel maps to a point at infinity");
  }
  if (q.z() == 1.0) return {q.x(), q.y()};
  return {q.x() / q.z(), q.y() / q.z()};
}

std::string format_matrix(const Homography& h) {
  std::string out;
  char buf[64];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", h(r, c));
      out += buf;
      out += (c < 2) ? ' ' : '\n';
    }
  }
  return out;
}

}  // namespace dsgen
