#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ftkn/nn/tensor.hpp"

namespace ftkn {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend bool operator==(Vec3 a, Vec3 b) = default;
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Stable point identity: (frame index, row in that frame's scene cloud).
using PointId = std::int64_t;
inline constexpr PointId kPadId = -1;

inline PointId make_point_id(std::uint32_t frame, std::uint32_t row) {
  return (static_cast<PointId>(frame) << 32) | static_cast<PointId>(row);
}
inline std::uint32_t point_frame(PointId id) { return static_cast<std::uint32_t>(id >> 32); }
inline std::uint32_t point_row(PointId id) { return static_cast<std::uint32_t>(id & 0xffffffffLL); }

/// N x D token features with the identity of the point behind each row.
struct TokenSequence {
  nn::Tensor features;
  std::vector<PointId> point_ids;  // kPadId for padding rows
  std::vector<Vec3> positions;     // world coordinates; zero for padding
  int frame_index = 0;

  std::size_t size() const { return point_ids.size(); }
  std::size_t dim() const { return features.cols(); }
  bool is_padding(std::size_t i) const { return point_ids[i] == kPadId; }
  bool all_padding() const;
  std::size_t valid_count() const;
  /// true for real (non-padding) tokens
  std::vector<bool> valid_mask() const;
  /// Rows in the given order; features stay on the autodiff graph.
  TokenSequence select(std::span<const std::size_t> rows) const;
  /// Throws DimensionError when row counts disagree.
  void check() const;
};

}  // namespace ftkn
