#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ftkn/geometry/scene_io.hpp"
#include "ftkn/harness/config.hpp"

namespace ftkn::harness {

/// Object size classes: car, pedestrian, cyclist.
inline constexpr int kClassCount = 3;
Vec3 class_mean_size(int class_id);

/// A sequence of sweeps; frame f holds the cloud and ground-truth boxes at time f * dt.
/// Box `i` in every frame is the same object (objects never leave the scene).
struct SyntheticScene {
  std::uint64_t seed = 0;
  std::vector<geometry::SceneFrame> frames;
  /// Surface points generated per frame and object (after clamping).
  std::vector<std::vector<std::size_t>> object_points;

  std::size_t frame_count() const { return frames.size(); }
};

/// Expected surface point count of a box at a given sensor range before clamping:
/// points_at_reference * (surface / car surface) * (reference_range / range)^2.
double expected_point_count(const geometry::Box7& box, double range, const SceneConfig& cfg);

/// Surface points (all faces but the floor) of a box with Gaussian noise.
void sample_box_surface(const geometry::Box7& box, std::size_t count, double noise, Rng& rng,
                        std::vector<Vec3>& out);

/// Deterministic in (cfg, seed). `object_count` overrides the sampled count when set.
SyntheticScene generate_scene(const ExperimentConfig& cfg, std::uint64_t seed,
                              std::optional<std::size_t> object_count = {});

/// Scene seeds for a split (0 = train, 1 = eval) derived from the experiment seed.
std::uint64_t scene_seed(std::uint64_t base, std::uint64_t split, std::uint64_t index);

std::vector<SyntheticScene> generate_dataset(const ExperimentConfig& cfg, std::uint64_t split, std::size_t count);

}  // namespace ftkn::harness
