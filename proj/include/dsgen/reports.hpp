#pragma once

// JSON documents: calibration files, scene specs and the reports written by
// the command-line tool. Reports carry a top-level "schema_version".

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "dsgen/camera_geometry.hpp"
#include "dsgen/ds_generator.hpp"
#include "dsgen/metrics.hpp"
#include "dsgen/plane_fit.hpp"
#include "dsgen/synthetic_scene.hpp"

namespace dsgen {

inline constexpr int kReportSchemaVersion = 1;

/// {"f": .., "o_u": .., "o_v": .., "baseline_Tc": ..}
StereoRig rig_from_json(const nlohmann::json& j);
nlohmann::json rig_to_json(const StereoRig& rig);
StereoRig load_calibration(const std::filesystem::path& path);
void save_calibration(const std::filesystem::path& path, const StereoRig& rig);

/// {"sample_id", "width", "height", "channels", "calibration": {...},
///  "plane": {"normal": [x, y, z], "distance": D},
///  "texture": {"kind": "sinusoid"|"checkerboard", "period_m", "seed"},
///  "background", "max_depth", "disparity_noise_sigma"}
/// Everything except "calibration" and "plane" is optional.
SyntheticScene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const SyntheticScene& scene);
SyntheticScene load_scene_spec(const std::filesystem::path& path);

nlohmann::json model_to_json(const RoadProjectionModel& model);

/// phi_rad, varkappa, kappa, residual_energy, m, inlier_count and, when a
/// rig is given, the equivalent plane {"normal": [..], "D": ..}.
nlohmann::json fit_to_json(const FitResult& fit, std::size_t observation_count,
                           const std::optional<StereoRig>& rig = std::nullopt);

nlohmann::json metrics_to_json(const ConfusionCounts& counts, const SegmentationMetrics& m);

nlohmann::json load_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline, written atomically.
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace dsgen
