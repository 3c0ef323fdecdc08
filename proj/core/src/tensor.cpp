#include "vfence/tensor.hpp"
#include "vfence/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

static_assert(std::endian::native == std::endian::little,
              "VFT1 I/O assumes a little-endian host");
static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

namespace vfence {

namespace {

constexpr std::array<char, 4> kMagic = {'V', 'F', 'T', '1'};

// Guards against allocation bombs from corrupt headers.
constexpr std::uint32_t kMaxCandidates = 10'000'000;

std::size_t payload_count(std::uint32_t n) {
  return static_cast<std::size_t>(kTensorAttributes) * n;
}

void check_finite_payload(const std::vector<float>& data, const char* what) {
  for (float v : data) {
    if (!std::isfinite(v)) {
      throw NonFiniteValueError(std::string(what) + ": payload contains a non-finite value");
    }
  }
}

} // namespace

void write_tensor(const DetectionFrameTensor& t, const std::filesystem::path& path) {
  if (t.n_candidates == 0) {
    throw DomainError("write_tensor: candidate count must be positive");
  }
  if (t.frame_width == 0 || t.frame_height == 0) {
    throw DomainError("write_tensor: frame dimensions must be positive");
  }
  if (t.data.size() != payload_count(t.n_candidates)) {
    throw DomainError("write_tensor: payload size does not match 84 x n_candidates");
  }
  for (float v : t.data) {
    if (!std::isfinite(v)) {
      throw DomainError("write_tensor: payload contains a non-finite value");
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("write_tensor: cannot open '" + path.string() + "' for writing");
  }
  out.write(kMagic.data(), kMagic.size());
  const std::uint32_t header[4] = {kTensorAttributes, t.n_candidates, t.frame_width,
                                   t.frame_height};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!out) {
    throw IoError("write_tensor: write to '" + path.string() + "' failed");
  }
}

DetectionFrameTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("read_tensor: cannot open '" + path.string() + "'");
  }

  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kMagic) {
    throw MalformedHeaderError("read_tensor: missing VFT1 magic in '" + path.string() + "'");
  }

  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(header))) {
    throw MalformedHeaderError("read_tensor: header truncated in '" + path.string() + "'");
  }
  if (header[0] != kTensorAttributes) {
    throw MalformedHeaderError("read_tensor: attribute count is " + std::to_string(header[0]) +
                               ", expected 84");
  }
  if (header[1] == 0 || header[1] > kMaxCandidates) {
    throw MalformedHeaderError("read_tensor: implausible candidate count " +
                               std::to_string(header[1]));
  }
  if (header[2] == 0 || header[3] == 0) {
    throw MalformedHeaderError("read_tensor: frame dimensions must be positive");
  }

  DetectionFrameTensor t;
  t.n_candidates = header[1];
  t.frame_width = header[2];
  t.frame_height = header[3];
  t.data.resize(payload_count(t.n_candidates));

  in.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(t.data.size() * sizeof(float))) {
    throw TruncatedPayloadError("read_tensor: expected " + std::to_string(t.data.size()) +
                                " payload values in '" + path.string() + "'");
  }
  char extra;
  if (in.read(&extra, 1); in.gcount() != 0) {
    throw TrailingDataError("read_tensor: trailing bytes after payload in '" + path.string() +
                            "'");
  }
  check_finite_payload(t.data, "read_tensor");
  return t;
}

namespace {

void place_candidate(DetectionFrameTensor& t, std::uint32_t col, double cx, double cy, double w,
                     double h, double person_logit) {
  t.at(0, col) = static_cast<float>(cx);
  t.at(1, col) = static_cast<float>(cy);
  t.at(2, col) = static_cast<float>(w);
  t.at(3, col) = static_cast<float>(h);
  t.at(4 + kPersonClassIndex, col) = static_cast<float>(person_logit);
}

} // namespace

DetectionFrameTensor synthesize_tensor(std::span<const GroundTruthPerson> persons,
                                       std::uint32_t n_candidates, std::uint32_t frame_width,
                                       std::uint32_t frame_height, double background_logit,
                                       unsigned duplicates) {
  if (n_candidates == 0) {
    throw DomainError("synthesize_tensor: candidate count must be positive");
  }
  if (frame_width == 0 || frame_height == 0) {
    throw DomainError("synthesize_tensor: frame dimensions must be positive");
  }
  if (!std::isfinite(background_logit)) {
    throw DomainError("synthesize_tensor: background logit must be finite");
  }
  const std::size_t needed = persons.size() * (1 + static_cast<std::size_t>(duplicates));
  if (needed > n_candidates) {
    throw DomainError("synthesize_tensor: " + std::to_string(needed) +
                      " candidates needed but tensor has " + std::to_string(n_candidates));
  }

  const double coord_cap = 2.0 * std::max(frame_width, frame_height);
  for (const auto& p : persons) {
    if (!(p.confidence > 0.0 && p.confidence < 1.0)) {
      throw DomainError("synthesize_tensor: confidence must lie strictly inside (0,1)");
    }
    if (!(p.width > 0.0) || !(p.height > 0.0)) {
      throw DomainError("synthesize_tensor: person box must have positive extent");
    }
    if (!std::isfinite(p.center_x) || !std::isfinite(p.center_y)) {
      throw DomainError("synthesize_tensor: person center must be finite");
    }
    const double lo = std::min(p.center_x - p.width / 2, p.center_y - p.height / 2);
    const double hi = std::max(p.center_x + p.width / 2, p.center_y + p.height / 2);
    if (lo < 0.0 || hi > coord_cap) {
      throw DomainError("synthesize_tensor: person box leaves the supported coordinate range");
    }
  }

  DetectionFrameTensor t;
  t.n_candidates = n_candidates;
  t.frame_width = frame_width;
  t.frame_height = frame_height;
  t.data.assign(payload_count(n_candidates), 0.0f);
  const float bg = static_cast<float>(background_logit);
  std::fill(t.data.begin() + 4 * static_cast<std::size_t>(n_candidates), t.data.end(), bg);

  std::uint32_t col = 0;
  for (const auto& p : persons) {
    const double logit = std::log(p.confidence / (1.0 - p.confidence));
    place_candidate(t, col++, p.center_x, p.center_y, p.width, p.height, logit);
    for (unsigned k = 1; k <= duplicates; ++k) {
      // Near-copies: shifted a few percent of the box width and scored just
      // below the original, so greedy suppression keeps the original.
      double dx = 0.04 * k * p.width;
      dx = std::min(dx, coord_cap - (p.center_x + p.width / 2)); // stay in range
      const double conf = std::max(p.confidence - 0.01 * k, p.confidence * 0.5);
      const double dup_logit = std::log(conf / (1.0 - conf));
      place_candidate(t, col++, p.center_x + dx, p.center_y, p.width, p.height, dup_logit);
    }
  }
  return t;
}

} // namespace vfence
