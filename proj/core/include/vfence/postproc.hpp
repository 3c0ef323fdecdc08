#pragma once

#include "vfence/tensor.hpp"

#include <optional>
#include <span>
#include <vector>

namespace vfence {

/// A person detection in corner form, pixel coordinates.
struct PersonDetection {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;
  double score = 0.0;
  int class_index = kPersonClassIndex;

  double center_x() const { return 0.5 * (x1 + x2); }
  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
};

struct PostprocConfig {
  /// Score threshold; a candidate survives only if its score is strictly above.
  double tau = 0.65;
  /// Overlap threshold for duplicate suppression; disabled when empty.
  std::optional<double> nms_iou = 0.45;
};

/// Numerically stable logistic function.
double sigmoid(double logit);

/// Per-class probabilities for one candidate's 80 class logits.
/// Throws DomainError unless exactly 80 finite logits are supplied.
std::vector<double> class_probabilities(std::span<const double> logits);

/// Intersection-over-union of two corner-form boxes. Degenerate boxes give 0.
double iou(const PersonDetection& a, const PersonDetection& b);

/// Greedy duplicate suppression: detections must arrive sorted by descending
/// score; each kept box removes later boxes overlapping it above `threshold`.
std::vector<PersonDetection> suppress_duplicates(std::vector<PersonDetection> sorted,
                                                 double threshold);

/// Full decode of one raw frame tensor: score each candidate, keep persons
/// strictly above tau, convert centers to corners, drop degenerate boxes,
/// sort by descending score, then suppress duplicates if configured.
std::vector<PersonDetection> decode(const DetectionFrameTensor& frame,
                                    const PostprocConfig& config);

} // namespace vfence
