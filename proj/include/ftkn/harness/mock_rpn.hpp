#pragma once

#include <cstdint>
#include <vector>

#include "ftkn/geometry/box.hpp"
#include "ftkn/harness/config.hpp"

namespace ftkn::harness {

/// Noisy detections for one frame. `source[i]` is the ground-truth index the
/// proposal was derived from, or -1 for a false positive.
struct ProposalSet {
  std::vector<geometry::Box7> boxes;
  std::vector<int> source;
};

/// Keeps each ground-truth box with probability `recall`, jitters center, size, yaw
/// and velocity, then adds Poisson(fp_rate) false positives inside the ring
/// [min_range, max_range]. Throws ConfigError unless recall lies in (0, 1].
ProposalSet mock_rpn(const std::vector<geometry::Box7>& gt, const RpnConfig& noise, const SceneConfig& scene,
                     std::uint64_t seed);

}  // namespace ftkn::harness
