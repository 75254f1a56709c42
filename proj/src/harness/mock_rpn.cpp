#include "ftkn/harness/mock_rpn.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ftkn/errors.hpp"
#include "ftkn/harness/scene_gen.hpp"
#include "ftkn/rng.hpp"

namespace ftkn::harness {

ProposalSet mock_rpn(const std::vector<geometry::Box7>& gt, const RpnConfig& noise, const SceneConfig& scene,
                     std::uint64_t seed) {
  if (!(noise.recall > 0.0 && noise.recall <= 1.0)) throw ConfigError("recall must lie in (0, 1]");
  Rng rng(seed);
  ProposalSet out;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    // draw every random number even for dropped boxes so the jitter of one box does
    // not depend on whether an earlier box was kept
    const bool keep = rng.uniform() < noise.recall;
    const Vec3 dc{rng.normal(0, noise.sigma_xyz), rng.normal(0, noise.sigma_xyz), rng.normal(0, 0.5 * noise.sigma_xyz)};
    const Vec3 ds{rng.normal(0, noise.sigma_size), rng.normal(0, noise.sigma_size), rng.normal(0, noise.sigma_size)};
    const double dyaw = rng.normal(0, noise.sigma_yaw);
    const double dvx = rng.normal(0, noise.sigma_velocity), dvy = rng.normal(0, noise.sigma_velocity);
    const double score = rng.uniform(0.5, 1.0);
    if (!keep) continue;
    const auto& g = gt[i];
    const Vec3 size{g.size.x * std::max(0.2, 1 + ds.x), g.size.y * std::max(0.2, 1 + ds.y),
                    g.size.z * std::max(0.2, 1 + ds.z)};
    const auto v = g.velocity_or_zero();
    out.boxes.push_back(geometry::Box7::make(g.center + dc, size, g.yaw + dyaw,
                                             geometry::Velocity{v.vx + dvx, v.vy + dvy}, score, g.class_id));
    out.source.push_back(static_cast<int>(i));
  }
  const std::size_t fps = noise.fp_rate > 0 ? std::poisson_distribution<std::size_t>(noise.fp_rate)(rng.engine()) : 0;
  for (std::size_t k = 0; k < fps; ++k) {
    const int cls = static_cast<int>(rng.index(kClassCount));
    const double range = rng.uniform(scene.min_range, scene.max_range);
    const double bearing = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const Vec3 size = class_mean_size(cls);
    out.boxes.push_back(geometry::Box7::make({range * std::cos(bearing), range * std::sin(bearing), 0.5 * size.z},
                                             size, rng.uniform(-std::numbers::pi, std::numbers::pi),
                                             geometry::Velocity{rng.normal(0, 1), rng.normal(0, 1)},
                                             rng.uniform(0.1, 0.5), cls));
    out.source.push_back(-1);
  }
  return out;
}

}  // namespace ftkn::harness
