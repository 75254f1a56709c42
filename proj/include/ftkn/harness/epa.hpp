#pragma once

#include <cstdint>
#include <vector>

#include "ftkn/geometry/box.hpp"
#include "ftkn/geometry/point_set.hpp"

namespace ftkn::harness {

struct EpaOptions {
  std::size_t threshold = 28;  // proposals with fewer region points get extra points
  std::size_t window = 2;      // neighbouring frames on each side
  std::size_t max_extra = 48;  // cap per proposal
  bool training = true;        // inference: no-op
};

/// Points inside the proposal's sampling cylinder.
std::size_t region_point_count(const geometry::PointSet& cloud, const geometry::Box7& box);

/// Extra points for point-poor proposals of frame `frame`. `clouds[i]` is the cloud of
/// scene frame i. Each poor proposal's box is moved along its velocity to the
/// neighbouring frames; the points in the moved region are carried back to the
/// proposal's time and kept with their original ids. The result is deduplicated by
/// id and sorted by id. Empty when not training.
geometry::PointSet epa_augment(const std::vector<const geometry::PointSet*>& clouds, std::size_t frame,
                               const std::vector<geometry::Box7>& proposals, const EpaOptions& opt,
                               std::uint64_t seed, double frame_dt = 0.1);

}  // namespace ftkn::harness
