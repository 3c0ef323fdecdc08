#include "vfence/postproc.hpp"
#include "vfence/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vfence {

double sigmoid(double logit) {
  if (logit >= 0.0) {
    return 1.0 / (1.0 + std::exp(-logit));
  }
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

std::vector<double> class_probabilities(std::span<const double> logits) {
  if (logits.size() != kClassCount) {
    throw DomainError("class_probabilities: expected 80 logits, got " +
                      std::to_string(logits.size()));
  }
  std::vector<double> probs(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i])) {
      throw DomainError("class_probabilities: logit " + std::to_string(i) + " is not finite");
    }
    probs[i] = sigmoid(logits[i]);
  }
  return probs;
}

double iou(const PersonDetection& a, const PersonDetection& b) {
  const double area_a = std::max(0.0, a.x2 - a.x1) * std::max(0.0, a.y2 - a.y1);
  const double area_b = std::max(0.0, b.x2 - b.x1) * std::max(0.0, b.y2 - b.y1);
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return inter / uni;
}

std::vector<PersonDetection> suppress_duplicates(std::vector<PersonDetection> sorted,
                                                 double threshold) {
  std::vector<PersonDetection> kept;
  kept.reserve(sorted.size());
  std::vector<bool> removed(sorted.size(), false);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (removed[i]) {
      continue;
    }
    kept.push_back(sorted[i]);
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (!removed[j] && iou(sorted[i], sorted[j]) > threshold) {
        removed[j] = true;
      }
    }
  }
  return kept;
}

std::vector<PersonDetection> decode(const DetectionFrameTensor& frame,
                                    const PostprocConfig& config) {
  if (frame.n_candidates == 0 || frame.data.size() != std::size_t{kTensorAttributes} * frame.n_candidates) {
    throw DomainError("decode: tensor payload does not match its candidate count");
  }
  if (!(config.tau >= 0.0 && config.tau < 1.0)) {
    throw DomainError("decode: tau must lie in [0, 1)");
  }
  if (config.nms_iou && !(*config.nms_iou >= 0.0 && *config.nms_iou <= 1.0)) {
    throw DomainError("decode: nms_iou must lie in [0, 1]");
  }

  const std::uint32_t n = frame.n_candidates;
  std::vector<PersonDetection> out;

  for (std::uint32_t col = 0; col < n; ++col) {
    // The logistic function is monotone, so the max class probability is the
    // probability of the max logit; one sigmoid per candidate suffices.
    float best_logit = frame.at(4, col);
    std::uint32_t best_class = 0;
    for (std::uint32_t c = 1; c < kClassCount; ++c) {
      const float l = frame.at(4 + c, col);
      if (l > best_logit) {
        best_logit = l;
        best_class = c;
      }
    }
    if (best_class != static_cast<std::uint32_t>(kPersonClassIndex)) {
      continue;
    }
    const double score = sigmoid(static_cast<double>(best_logit));
    if (!(score > config.tau)) {
      continue;
    }

    const double cx = frame.at(0, col);
    const double cy = frame.at(1, col);
    const double w = frame.at(2, col);
    const double h = frame.at(3, col);
    if (!(w > 0.0) || !(h > 0.0)) {
      continue;
    }
    PersonDetection d;
    d.x1 = cx - w / 2.0;
    d.y1 = cy - h / 2.0;
    d.x2 = cx + w / 2.0;
    d.y2 = cy + h / 2.0;
    d.score = score;
    d.class_index = kPersonClassIndex;
    out.push_back(d);
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const PersonDetection& a, const PersonDetection& b) {
                     return a.score > b.score;
                   });
  if (config.nms_iou) {
    out = suppress_duplicates(std::move(out), *config.nms_iou);
  }
  return out;
}

} // namespace vfence
