#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsgen {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateGeometry,
  kInvalidModel,
  kDegeneratePlane,
  kPointAtInfinity,
  kDegenerateObservations,
  kPlaneThroughBaseline,
  kInsufficientData,
  kUnfittable,
  kShapeMismatch,
  kMissingFile,
  kMalformedFile,
  kDimensionMismatch,
  kIo,
  kDuplicateId,
  kDegenerateScene,
  kConfig,
};

/// Stable snake_case name, used in machine-readable error summaries.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dsgen
