#pragma once

#include <vector>

#include "ftkn/geometry/box.hpp"

namespace ftkn::geometry {

inline constexpr double kFrameDt = 0.1;

/// Per-proposal box chain over T frames; boxes.back() is the current frame.
struct ProposalTrajectory {
  std::vector<Box7> boxes;
  std::vector<bool> valid;  // true = matched, false = velocity proxy
  int proposal_id = 0;

  std::size_t length() const { return boxes.size(); }
};

/// Box moved back in time by one step of `dt` along its velocity.
Box7 proxy_box(const Box7& box, double dt);

/// Greedy backward chaining. `prev_frames[i]` holds the boxes of frame (current - 1 - i).
/// At each step the last linked box is projected back with -v*dt; the frame box
/// with the highest BEV IoU against that projection is linked when the IoU reaches
/// `iou_thresh`, otherwise the projection itself is used as a proxy. Frames beyond
/// prev_frames.size() count as empty.
ProposalTrajectory build_trajectory(const Box7& current, const std::vector<std::vector<Box7>>& prev_frames,
                                    std::size_t T, double iou_thresh, double frame_dt = kFrameDt,
                                    int proposal_id = 0);

}  // namespace ftkn::geometry
