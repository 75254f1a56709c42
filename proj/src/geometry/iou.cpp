#include "ftkn/geometry/iou.hpp"

#include <algorithm>
#include <cmath>

namespace ftkn::geometry {

namespace {

double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

Point2 line_intersection(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const double a1 = p2.y - p1.y, b1 = p1.x - p2.x, c1 = a1 * p1.x + b1 * p1.y;
  const double a2 = q2.y - q1.y, b2 = q1.x - q2.x, c2 = a2 * q1.x + b2 * q1.y;
  const double det = a1 * b2 - a2 * b1;
  if (std::abs(det) < 1e-300) return p2;
  return {(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
}

}  // namespace

std::array<Point2, 4> bev_corners(const Box7& box) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const double hl = box.length() * 0.5, hw = box.width() * 0.5;
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  std::array<Point2, 4> out;
  for (int i = 0; i < 4; ++i)
    out[i] = {box.center.x + c * lx[i] - s * ly[i], box.center.y + s * lx[i] + c * ly[i]};
  return out;
}

double polygon_area(const std::vector<Point2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

std::vector<Point2> clip_convex(const std::vector<Point2>& subject, const std::vector<Point2>& clip) {
  std::vector<Point2> output = subject;
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Point2 a = clip[e];
    const Point2 b = clip[(e + 1) % clip.size()];
    std::vector<Point2> input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Point2 cur = input[i];
      const Point2 prev = input[(i + input.size() - 1) % input.size()];
      const bool cur_in = cross(a, b, cur) >= 0.0;
      const bool prev_in = cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(line_intersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(line_intersection(prev, cur, a, b));
      }
    }
  }
  return output;
}

double iou_bev(const Box7& a, const Box7& b) {
  const double area_a = a.length() * a.width();
  const double area_b = b.length() * b.width();
  if (!(area_a > 0.0) || !(area_b > 0.0)) return 0.0;
  // Quick reject on circumscribed circles.
  const double dx = a.center.x - b.center.x, dy = a.center.y - b.center.y;
  const double reach = 0.5 * (a.bev_diagonal() + b.bev_diagonal());
  if (dx * dx + dy * dy > reach * reach) return 0.0;

  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);
  const auto inter = clip_convex({ca.begin(), ca.end()}, {cb.begin(), cb.end()});
  if (inter.size() < 3) return 0.0;
  const double overlap = std::max(0.0, polygon_area(inter));
  const double uni = area_a + area_b - overlap;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(overlap / uni, 0.0, 1.0);
}

}  // namespace ftkn::geometry
