#pragma once

#include <array>
#include <vector>

#include "ftkn/geometry/box.hpp"

namespace ftkn::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Counter-clockwise BEV footprint corners.
std::array<Point2, 4> bev_corners(const Box7& box);

/// Signed shoelace area; positive for counter-clockwise polygons.
double polygon_area(const std::vector<Point2>& poly);

/// Intersection of two convex counter-clockwise polygons (Sutherland-Hodgman).
std::vector<Point2> clip_convex(const std::vector<Point2>& subject, const std::vector<Point2>& clip);

/// Rotated-rectangle intersection over union in the ground plane; 0 for degenerate
/// (zero-area) inputs.
double iou_bev(const Box7& a, const Box7& b);

}  // namespace ftkn::geometry
