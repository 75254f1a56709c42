#include "ftkn/geometry/box.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ftkn/errors.hpp"

namespace ftkn::geometry {

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(radians + std::numbers::pi, two_pi);
  if (r < 0) r += two_pi;
  r -= std::numbers::pi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi
  if (r >= std::numbers::pi) r -= two_pi;
  return r;
}

Box7 Box7::make(Vec3 center, Vec3 size, double yaw, std::optional<Velocity> velocity, double score, int class_id) {
  if (!(size.x > 0.0 && size.y > 0.0 && size.z > 0.0))
    throw ConfigError("box sizes must be strictly positive");
  Box7 b;
  b.center = center;
  b.size = size;
  b.yaw = wrap_angle(yaw);
  b.velocity = velocity;
  b.score = score;
  b.class_id = class_id;
  return b;
}

double Box7::bev_diagonal() const { return std::sqrt(size.x * size.x + size.y * size.y); }

std::array<Vec3, 9> box_keypoints(const Box7& box) {
  std::array<Vec3, 9> kp;
  kp[0] = box.center;
  const Vec3 half = box.size * 0.5;
  for (int i = 0; i < 8; ++i) {
    const double sx = (i & 4) ? -1.0 : 1.0;
    const double sy = (i & 2) ? -1.0 : 1.0;
    const double sz = (i & 1) ? -1.0 : 1.0;
    kp[i + 1] = from_box_frame(box, {sx * half.x, sy * half.y, sz * half.z});
  }
  return kp;
}

Vec3 to_box_frame(const Box7& box, Vec3 p) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const Vec3 d = p - box.center;
  return {c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
}

Vec3 from_box_frame(const Box7& box, Vec3 local) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  return Vec3{c * local.x - s * local.y, s * local.x + c * local.y, local.z} + box.center;
}

bool contains(const Box7& box, Vec3 p) {
  const Vec3 l = to_box_frame(box, p);
  return std::abs(l.x) < box.size.x * 0.5 && std::abs(l.y) < box.size.y * 0.5 && std::abs(l.z) < box.size.z * 0.5;
}

}  // namespace ftkn::geometry
