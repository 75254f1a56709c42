#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ftkn/types.hpp"

namespace ftkn::geometry {

/// Wraps an angle into [-pi, pi).
double wrap_angle(double radians);

struct Velocity {
  double vx = 0.0;
  double vy = 0.0;
};

/// Oriented 3-D box: center, size (l, w, h) along the box's x/y/z axes, yaw about +z.
struct Box7 {
  Vec3 center;
  Vec3 size{1.0, 1.0, 1.0};
  double yaw = 0.0;
  std::optional<Velocity> velocity;
  double score = 1.0;
  int class_id = 0;

  /// Validating constructor: sizes must be strictly positive; yaw gets wrapped.
  static Box7 make(Vec3 center, Vec3 size, double yaw, std::optional<Velocity> velocity = {}, double score = 1.0,
                   int class_id = 0);

  double length() const { return size.x; }
  double width() const { return size.y; }
  double height() const { return size.z; }
  /// Diagonal of the bird's-eye-view footprint.
  double bev_diagonal() const;
  Velocity velocity_or_zero() const { return velocity.value_or(Velocity{}); }
};

/// j = 0 is the center; j = 1..8 are corners with sign pattern
/// (sx, sy, sz) = (+/-, +/-, +/-), x-sign slowest, z-sign fastest, '+' first.
std::array<Vec3, 9> box_keypoints(const Box7& box);

/// World point expressed in the box frame (box center at origin, yaw removed).
Vec3 to_box_frame(const Box7& box, Vec3 p);
Vec3 from_box_frame(const Box7& box, Vec3 local);

/// Strict containment in the (unscaled) box.
bool contains(const Box7& box, Vec3 p);

}  // namespace ftkn::geometry
