#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace vfence {

inline constexpr std::uint32_t kTensorAttributes = 84; ///< 4 box rows + 80 class logits
inline constexpr std::uint32_t kClassCount = 80;
inline constexpr int kPersonClassIndex = 0;

/// Raw detector output for one frame, shape (1, 84, N): rows 0-3 are
/// center-format boxes [cx, cy, w, h] in pixels, rows 4-83 are class logits.
/// Storage is attribute-major: data[row * n_candidates + col].
///
/// On disk this is the "VFT1" format: magic bytes "VFT1", then four
/// little-endian uint32 (attribute count 84, candidate count N, frame width,
/// frame height), then 84*N little-endian float32 payload values in the same
/// attribute-major order. All payload values must be finite; box rows stay
/// within [0, 2*max(width, height)] (producers enforce this, the reader only
/// rejects non-finite values).
struct DetectionFrameTensor {
  std::uint32_t n_candidates = 0;
  std::uint32_t frame_width = 0;
  std::uint32_t frame_height = 0;
  std::vector<float> data;

  float at(std::uint32_t row, std::uint32_t col) const {
    return data[static_cast<std::size_t>(row) * n_candidates + col];
  }
  float& at(std::uint32_t row, std::uint32_t col) {
    return data[static_cast<std::size_t>(row) * n_candidates + col];
  }

  bool operator==(const DetectionFrameTensor&) const = default;
};

/// Input to tensor synthesis: a person annotation in frame coordinates.
struct GroundTruthPerson {
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 0.0;      // must be > 0
  double height = 0.0;     // must be > 0
  double confidence = 0.0; // must be strictly inside (0, 1)
};

/// Serialize to the VFT1 binary format. Rejects tensors with a zero candidate
/// count, wrong payload size or non-finite values.
void write_tensor(const DetectionFrameTensor& t, const std::filesystem::path& path);

/// Parse a VFT1 file. Throws MalformedHeaderError, TruncatedPayloadError,
/// TrailingDataError or NonFiniteValueError; the round trip through
/// write_tensor is bit-exact.
DetectionFrameTensor read_tensor(const std::filesystem::path& path);

/// Build a detector-output tensor from ground-truth persons so the decode
/// path can run without a neural network. Person k occupies candidate column
/// k with its box rows and a person-class logit of ln(c/(1-c)); every other
/// logit (and every unused candidate) holds background_logit. With
/// duplicates > 0, each person is followed by that many slightly offset,
/// slightly lower-scoring near-copies to exercise duplicate suppression.
DetectionFrameTensor synthesize_tensor(std::span<const GroundTruthPerson> persons,
                                       std::uint32_t n_candidates,
                                       std::uint32_t frame_width,
                                       std::uint32_t frame_height,
                                       double background_logit,
                                       unsigned duplicates = 0);

} // namespace vfence
