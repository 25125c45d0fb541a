#include "dsgen/metrics.hpp"

#include <cstdio>

#include "dsgen/error.hpp"

namespace dsgen {

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& defined) {
  defined = den != 0;
  return defined ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) noexcept {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt,
                          const std::optional<BinaryMask>& roi) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction and ground truth differ in size");
  }
  if (roi && (roi->width() != gt.width() || roi->height() != gt.height())) {
    throw Error(ErrorCode::kDimensionMismatch, "region of interest differs in size");
  }
  ConfusionCounts counts;
  const auto& p = pred.bits();
  const auto& g = gt.bits();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (roi && roi->bits()[i] == 0) continue;
    if (p[i]) {
      g[i] ? ++counts.tp : ++counts.fp;
    } else {
      g[i] ? ++counts.fn : ++counts.tn;
    }
  }
  return counts;
}

SegmentationMetrics segmentation_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::kInvalidArgument, "no pixels were evaluated");
  SegmentationMetrics m;
  bool accuracy_defined = true;
  m.accuracy = ratio(c.tp + c.tn, c.total(), accuracy_defined);
  m.precision = ratio(c.tp, c.tp + c.fp, m.precision_defined);
  m.recall = ratio(c.tp, c.tp + c.fn, m.recall_defined);
  m.fscore = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, m.fscore_defined);
  m.iou = ratio(c.tp, c.tp + c.fp + c.fn, m.iou_defined);
  return m;
}

std::string format_metrics_table(const std::string& label, const SegmentationMetrics& m) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-24s %9s %9s %9s %9s %9s\n", "", "Accuracy", "Precision",
                "Recall", "F-Score", "IoU");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-24s %9.2f %9.2f %9.2f %9.2f %9.2f\n", label.c_str(),
                100.0 * m.accuracy, 100.0 * m.precision, 100.0 * m.recall, 100.0 * m.fscore,
                100.0 * m.iou);
  out += buf;
  return out;
}

}  // namespace dsgen
