#pragma once

#include <cstdint>
#include <vector>

#include "ftkn/geometry/box.hpp"
#include "ftkn/geometry/point_set.hpp"

namespace ftkn::geometry {

/// Vertical cylinder through the box center: radius = 1.2 * half BEV diagonal,
/// height = 1.2 * box height, centered on the box center.
struct Cylinder {
  Vec3 center;
  double radius = 0.0;
  double half_height = 0.0;

  static Cylinder around(const Box7& box);
  bool contains(Vec3 p) const;
};

struct CylinderSample {
  PointSet points;             // exactly `count` rows
  std::vector<bool> pad_mask;  // true = real point, false = padding
};

/// Rows of `cloud` inside the box's cylinder, ascending.
std::vector<std::size_t> cylinder_members(const PointSet& cloud, const Box7& box);

/// Uniform sample without replacement of in-cylinder points, in ascending cloud
/// order; shortfall rows are zero with id kPadId.
CylinderSample cylindrical_sample(const PointSet& cloud, const Box7& box, std::size_t count, std::uint64_t seed);

}  // namespace ftkn::geometry
