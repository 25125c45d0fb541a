#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dsgen/raster.hpp"

namespace dsgen {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& other) noexcept;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Ratios with a zero denominator are reported as 0 and flagged undefined.
struct SegmentationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  double iou = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  bool fscore_defined = true;
  bool iou_defined = true;
};

/// Per-pixel tally. When `roi` is given only pixels inside it are counted.
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt,
                          const std::optional<BinaryMask>& roi = std::nullopt);

/// F-score is F1, evaluated as 2tp / (2tp + fp + fn), which equals the
/// harmonic mean of precision and recall whenever both are defined.
SegmentationMetrics segmentation_metrics(const ConfusionCounts& counts);

/// "Accuracy  Precision  Recall  F-Score  IoU" header and one row of
/// percentages, fixed-width columns.
std::string format_metrics_table(const std::string& label, const SegmentationMetrics& m);

}  // namespace dsgen
