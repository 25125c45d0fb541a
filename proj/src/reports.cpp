#include "dsgen/reports.hpp"

#include "dsgen/dataset_io.hpp"
#include "dsgen/error.hpp"

namespace dsgen {

namespace {

using nlohmann::json;

template <typename T>
T required(const json& j, const char* key, const char* context) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kConfig, std::string(context) + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string(context) + ": bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T optional_value(const json& j, const char* key, T fallback, const char* context) {
  if (!j.contains(key)) return fallback;
  return required<T>(j, key, context);
}

}  // namespace

StereoRig rig_from_json(const json& j) {
  constexpr const char* ctx = "calibration";
  return StereoRig(CameraIntrinsics(required<double>(j, "f", ctx), required<double>(j, "o_u", ctx),
                                    required<double>(j, "o_v", ctx)),
                   required<double>(j, "baseline_Tc", ctx));
}

json rig_to_json(const StereoRig& rig) {
  const auto& k = rig.intrinsics();
  return {{"f", k.f()}, {"o_u", k.o_u()}, {"o_v", k.o_v()}, {"baseline_Tc", rig.baseline()}};
}

StereoRig load_calibration(const std::filesystem::path& path) {
  try {
    return rig_from_json(load_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) {
      throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
    }
    throw;
  }
}

void save_calibration(const std::filesystem::path& path, const StereoRig& rig) {
  save_json(path, rig_to_json(rig));
}

SyntheticScene scene_from_json(const json& j) {
  constexpr const char* ctx = "scene";
  const StereoRig rig = rig_from_json(required<json>(j, "calibration", ctx));
  const json plane_j = required<json>(j, "plane", ctx);
  const auto normal = required<std::vector<double>>(plane_j, "normal", "scene.plane");
  if (normal.size() != 3) throw Error(ErrorCode::kConfig, "scene.plane.normal must have 3 entries");
  const PlaneParams plane(Eigen::Vector3d(normal[0], normal[1], normal[2]),
                          required<double>(plane_j, "distance", "scene.plane"));

  TextureSpec texture;
  if (j.contains("texture")) {
    const json& t = j.at("texture");
    const auto kind = optional_value<std::string>(t, "kind", "sinusoid", "scene.texture");
    if (kind == "sinusoid") {
      texture.kind = TextureKind::kSinusoid;
    } else if (kind == "checkerboard") {
      texture.kind = TextureKind::kCheckerboard;
    } else {
      throw Error(ErrorCode::kConfig, "scene.texture.kind must be 'sinusoid' or 'checkerboard'");
    }
    texture.period_m = optional_value<double>(t, "period_m", texture.period_m, "scene.texture");
    texture.seed = optional_value<std::uint64_t>(t, "seed", texture.seed, "scene.texture");
  }

  SyntheticScene scene{rig, plane, texture};
  scene.sample_id = optional_value<std::string>(j, "sample_id", scene.sample_id, ctx);
  scene.width = optional_value<int>(j, "width", scene.width, ctx);
  scene.height = optional_value<int>(j, "height", scene.height, ctx);
  scene.channels = optional_value<int>(j, "channels", scene.channels, ctx);
  scene.background = static_cast<std::uint8_t>(optional_value<int>(j, "background", 0, ctx));
  scene.max_depth = optional_value<double>(j, "max_depth", scene.max_depth, ctx);
  scene.disparity_noise_sigma =
      optional_value<double>(j, "disparity_noise_sigma", scene.disparity_noise_sigma, ctx);
  return scene;
}

json scene_to_json(const SyntheticScene& scene) {
  const Eigen::Vector3d& n = scene.plane.normal();
  return {
      {"sample_id", scene.sample_id},
      {"width", scene.width},
      {"height", scene.height},
      {"channels", scene.channels},
      {"calibration", rig_to_json(scene.rig)},
      {"plane", {{"normal", {n.x(), n.y(), n.z()}}, {"distance", scene.plane.distance()}}},
      {"texture",
       {{"kind", scene.texture.kind == TextureKind::kSinusoid ? "sinusoid" : "checkerboard"},
        {"period_m", scene.texture.period_m},
        {"seed", scene.texture.seed}}},
      {"background", static_cast<int>(scene.background)},
      {"max_depth", scene.max_depth},
      {"disparity_noise_sigma", scene.disparity_noise_sigma},
  };
}

SyntheticScene load_scene_spec(const std::filesystem::path& path) {
  try {
    return scene_from_json(load_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
    throw;
  }
}

json model_to_json(const RoadProjectionModel& model) {
  return {{"phi_rad", model.roll()}, {"varkappa", model.gain()}, {"kappa", model.offset()}};
}

json fit_to_json(const FitResult& fit, std::size_t observation_count,
                 const std::optional<StereoRig>& rig) {
  json j = model_to_json(fit.model);
  j["residual_energy"] = fit.residual_energy;
  j["m"] = observation_count;
  j["inlier_count"] = fit.inlier_count;
  if (rig) {
    try {
      const PlaneParams plane = model_to_plane(*rig, fit.model);
      const Eigen::Vector3d& n = plane.normal();
      j["plane"] = {{"normal", {n.x(), n.y(), n.z()}}, {"D", plane.distance()}};
    } catch (const Error& e) {
      j["plane"] = nullptr;
      j["plane_error"] = std::string(to_string(e.code()));
    }
  }
  return j;
}

json metrics_to_json(const ConfusionCounts& counts, const SegmentationMetrics& m) {
  json undefined = json::array();
  if (!m.precision_defined) undefined.push_back("precision");
  if (!m.recall_defined) undefined.push_back("recall");
  if (!m.fscore_defined) undefined.push_back("fscore");
  if (!m.iou_defined) undefined.push_back("iou");
  return {
      {"counts", {{"tp", counts.tp}, {"fp", counts.fp}, {"fn", counts.fn}, {"tn", counts.tn}}},
      {"accuracy", m.accuracy},
      {"precision", m.precision},
      {"recall", m.recall},
      {"fscore", m.fscore},
      {"iou", m.iou},
      {"undefined", undefined},
  };
}

json load_json(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  }
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, "cannot parse JSON in " + path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace dsgen
