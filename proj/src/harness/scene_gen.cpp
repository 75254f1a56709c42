#include "ftkn/harness/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ftkn/geometry/iou.hpp"
#include "ftkn/geometry/trajectory.hpp"
#include "ftkn/harness/thread_pool.hpp"

namespace ftkn::harness {

namespace {

constexpr double kCarSurface = 2 * (4.5 * 1.9 + 4.5 * 1.6 + 1.9 * 1.6) - 4.5 * 1.9;

double visible_surface(const Vec3& s) { return 2 * (s.x * s.y + s.x * s.z + s.y * s.z) - s.x * s.y; }

double max_speed_for(int class_id, double cap) {
  static constexpr double speeds[kClassCount] = {10.0, 1.5, 5.0};
  return std::min(cap, speeds[class_id]);
}

struct ObjectState {
  geometry::Box7 box;
  double speed = 0.0;
};

}  // namespace

Vec3 class_mean_size(int class_id) {
  switch (class_id) {
    case 0: return {4.5, 1.9, 1.6};
    case 1: return {0.8, 0.7, 1.75};
    default: return {1.8, 0.7, 1.7};
  }
}

double expected_point_count(const geometry::Box7& box, double range, const SceneConfig& cfg) {
  const double r = std::max(range, 1e-6);
  const double falloff = (cfg.reference_range / r) * (cfg.reference_range / r);
  return cfg.points_at_reference * visible_surface(box.size) / kCarSurface * falloff;
}

void sample_box_surface(const geometry::Box7& box, std::size_t count, double noise, Rng& rng,
                        std::vector<Vec3>& out) {
  const double l = box.size.x, w = box.size.y, h = box.size.z;
  // faces: +x, -x, +y, -y, top
  const double areas[5] = {w * h, w * h, l * h, l * h, l * w};
  std::discrete_distribution<int> face(std::begin(areas), std::end(areas));
  for (std::size_t i = 0; i < count; ++i) {
    const double a = rng.uniform(-0.5, 0.5), b = rng.uniform(-0.5, 0.5);
    Vec3 local;
    switch (face(rng.engine())) {
      case 0: local = {0.5 * l, a * w, b * h}; break;
      case 1: local = {-0.5 * l, a * w, b * h}; break;
      case 2: local = {a * l, 0.5 * w, b * h}; break;
      case 3: local = {a * l, -0.5 * w, b * h}; break;
      default: local = {a * l, b * w, 0.5 * h}; break;
    }
    local = local + Vec3{rng.normal(0, noise), rng.normal(0, noise), rng.normal(0, noise)};
    out.push_back(geometry::from_box_frame(box, local));
  }
}

std::uint64_t scene_seed(std::uint64_t base, std::uint64_t split, std::uint64_t index) {
  return mix_seed(base, 0x5ce7e, split, index);
}

SyntheticScene generate_scene(const ExperimentConfig& cfg, std::uint64_t seed, std::optional<std::size_t> object_count) {
  const auto& sc = cfg.scene;
  Rng rng(seed);
  const std::size_t frames = cfg.frames_per_scene();
  const std::size_t n_obj =
      object_count ? *object_count : sc.min_objects + rng.index(sc.max_objects - sc.min_objects + 1);

  // spawn without BEV overlap; frame 0 positions
  std::vector<ObjectState> objects;
  for (std::size_t tries = 0; objects.size() < n_obj && tries < 1000 * (n_obj + 1); ++tries) {
    const int cls = static_cast<int>(rng.index(kClassCount));
    Vec3 size = class_mean_size(cls);
    size = {size.x * rng.uniform(0.9, 1.1), size.y * rng.uniform(0.9, 1.1), size.z * rng.uniform(0.9, 1.1)};
    const double range = rng.uniform(sc.min_range, sc.max_range);
    const double bearing = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double speed = rng.uniform(0.0, max_speed_for(cls, sc.max_speed));
    Vec3 center{range * std::cos(bearing), range * std::sin(bearing), 0.5 * size.z};
    auto box = geometry::Box7::make(center, size, yaw, geometry::Velocity{speed * std::cos(yaw), speed * std::sin(yaw)},
                                    1.0, cls);
    // keep a margin so objects never touch over the sequence
    auto padded = box;
    padded.size = {size.x + speed * 0.1 * frames + 1.0, size.y + speed * 0.1 * frames + 1.0, size.z};
    bool clear = true;
    for (const auto& o : objects) {
      auto other = o.box;
      other.size = {other.size.x + o.speed * 0.1 * frames + 1.0, other.size.y + o.speed * 0.1 * frames + 1.0,
                    other.size.z};
      if (geometry::iou_bev(padded, other) > 0.0) clear = false;
    }
    if (clear) objects.push_back({box, speed});
  }

  SyntheticScene scene;
  scene.seed = seed;
  const double half = sc.extent;
  const double clutter_mean = sc.clutter_per_m2 * (2 * half) * (2 * half);
  for (std::size_t f = 0; f < frames; ++f) {
    geometry::SceneFrame frame;
    frame.frame_index = static_cast<std::uint32_t>(f);
    std::vector<Vec3> pts;
    std::vector<double> intensity;
    std::vector<std::size_t> counts;
    for (auto& o : objects) {
      if (f > 0) {
        // constant velocity with a small perturbation of the travelled path
        auto v = o.box.velocity_or_zero();
        o.box.center = o.box.center + Vec3{v.vx * geometry::kFrameDt + rng.normal(0, sc.motion_noise * o.speed * 0.1),
                                           v.vy * geometry::kFrameDt + rng.normal(0, sc.motion_noise * o.speed * 0.1),
                                           0.0};
      }
      frame.boxes.push_back(o.box);
      const double range = std::hypot(o.box.center.x, o.box.center.y);
      const double lambda = expected_point_count(o.box, range, sc);
      std::size_t n = std::poisson_distribution<std::size_t>(lambda)(rng.engine());
      n = std::clamp(n, sc.min_points, sc.max_points);
      const std::size_t before = pts.size();
      sample_box_surface(o.box, n, sc.point_noise, rng, pts);
      for (std::size_t i = before; i < pts.size(); ++i) intensity.push_back(rng.uniform(0.4, 0.9));
      counts.push_back(n);
    }
    const std::size_t clutter = std::poisson_distribution<std::size_t>(clutter_mean)(rng.engine());
    for (std::size_t i = 0; i < clutter; ++i) {
      Vec3 p{rng.uniform(-half, half), rng.uniform(-half, half), rng.uniform(0.0, 2.5)};
      bool inside = false;
      for (const auto& o : objects) inside = inside || geometry::contains(o.box, p);
      if (inside) continue;
      pts.push_back(p);
      intensity.push_back(rng.uniform(0.0, 0.3));
    }
    frame.points.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double e[1] = {intensity[i]};
      frame.points.push_back(pts[i], e, 0.0, make_point_id(frame.frame_index, static_cast<std::uint32_t>(i)));
    }
    scene.object_points.push_back(std::move(counts));
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

std::vector<SyntheticScene> generate_dataset(const ExperimentConfig& cfg, std::uint64_t split, std::size_t count) {
  std::vector<SyntheticScene> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = generate_scene(cfg, scene_seed(cfg.seed, split, i)); });
  return out;
}

}  // namespace ftkn::harness
