#include "dsgen/error.hpp"

namespace dsgen {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDegenerateGeometry: return "degenerate_geometry";
    case ErrorCode::kInvalidModel: return "invalid_model";
    case ErrorCode::kDegeneratePlane: return "degenerate_plane";
    case ErrorCode::kPointAtInfinity: return "point_at_infinity";
    case ErrorCode::kDegenerateObservations: return "degenerate_observations";
    case ErrorCode::kPlaneThroughBaseline: return "plane_through_baseline";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kUnfittable: return "unfittable";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kMissingFile: return "missing_file";
    case ErrorCode::kMalformedFile: return "malformed_file";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kDegenerateScene: return "degenerate_scene";
    case ErrorCode::kConfig: return "config_error";
  }
  return "unknown";
}

}  // namespace dsgen
