#include "ftkn/geometry/sampling.hpp"

#include <cmath>
#include <string>

#include "ftkn/errors.hpp"
#include "ftkn/rng.hpp"

namespace ftkn::geometry {

Cylinder Cylinder::around(const Box7& box) {
  const double half_diag = std::sqrt(box.length() * box.length() + box.width() * box.width()) * 0.5;
  return {box.center, half_diag * 1.2, box.height() * 1.2 * 0.5};
}

bool Cylinder::contains(Vec3 p) const {
  const double dx = p.x - center.x, dy = p.y - center.y;
  return dx * dx + dy * dy <= radius * radius && std::abs(p.z - center.z) <= half_height;
}

std::vector<std::size_t> cylinder_members(const PointSet& cloud, const Box7& box) {
  const auto cyl = Cylinder::around(box);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (cyl.contains(cloud.coords[i])) rows.push_back(i);
  return rows;
}

CylinderSample cylindrical_sample(const PointSet& cloud, const Box7& box, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("cylindrical_sample: count must be >= 1");
  const auto members = cylinder_members(cloud, box);
  Rng rng(seed);
  const auto picks = rng.sample_without_replacement(members.size(), count);

  CylinderSample out{PointSet(cloud.extra_dim), {}};
  out.points.reserve(count);
  out.pad_mask.reserve(count);
  for (auto p : picks) {
    out.points.push_row(cloud, members[p]);
    out.pad_mask.push_back(true);
  }
  while (out.points.size() < count) {
    out.points.push_padding();
    out.pad_mask.push_back(false);
  }
  return out;
}

}  // namespace ftkn::geometry
