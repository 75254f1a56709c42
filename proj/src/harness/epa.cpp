#include "ftkn/harness/epa.hpp"

#include <algorithm>
#include <map>

#include "ftkn/geometry/sampling.hpp"
#include "ftkn/rng.hpp"

namespace ftkn::harness {

std::size_t region_point_count(const geometry::PointSet& cloud, const geometry::Box7& box) {
  return geometry::cylinder_members(cloud, box).size();
}

geometry::PointSet epa_augment(const std::vector<const geometry::PointSet*>& clouds, std::size_t frame,
                               const std::vector<geometry::Box7>& proposals, const EpaOptions& opt,
                               std::uint64_t seed, double frame_dt) {
  const std::size_t extra_dim = clouds.empty() || !clouds[frame] ? 1 : clouds[frame]->extra_dim;
  geometry::PointSet out(extra_dim);
  if (!opt.training || clouds.empty()) return out;
  std::map<PointId, std::pair<const geometry::PointSet*, std::pair<std::size_t, Vec3>>> chosen;
  for (std::size_t j = 0; j < proposals.size(); ++j) {
    const auto& box = proposals[j];
    if (region_point_count(*clouds[frame], box) >= opt.threshold) continue;
    const auto v = box.velocity_or_zero();
    // (cloud, row, shift back to the proposal's time)
    std::vector<std::tuple<const geometry::PointSet*, std::size_t, Vec3>> found;
    for (long d = -static_cast<long>(opt.window); d <= static_cast<long>(opt.window); ++d) {
      const long f = static_cast<long>(frame) + d;
      if (d == 0 || f < 0 || f >= static_cast<long>(clouds.size()) || !clouds[f]) continue;
      const Vec3 shift{v.vx * d * frame_dt, v.vy * d * frame_dt, 0.0};
      auto moved = box;
      moved.center = box.center + shift;
      for (auto row : geometry::cylinder_members(*clouds[f], moved)) found.emplace_back(clouds[f], row, shift);
    }
    Rng rng(mix_seed(seed, j));
    for (auto idx : rng.sample_without_replacement(found.size(), opt.max_extra)) {
      const auto& [cloud, row, shift] = found[idx];
      chosen.emplace(cloud->ids[row], std::make_pair(cloud, std::make_pair(row, shift)));
    }
  }
  for (const auto& [id, src] : chosen) {
    const auto& [cloud, rs] = src;
    out.push_back(cloud->coords[rs.first] - rs.second, cloud->extra(rs.first), 0.0, id);
  }
  return out;
}

}  // namespace ftkn::harness
