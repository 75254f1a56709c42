#include "ftkn/geometry/trajectory.hpp"

#include <algorithm>

#include "ftkn/errors.hpp"
#include "ftkn/geometry/iou.hpp"

namespace ftkn::geometry {

Box7 proxy_box(const Box7& box, double dt) {
  Box7 p = box;
  const auto v = box.velocity_or_zero();
  p.center.x -= v.vx * dt;
  p.center.y -= v.vy * dt;
  return p;
}

ProposalTrajectory build_trajectory(const Box7& current, const std::vector<std::vector<Box7>>& prev_frames,
                                    std::size_t T, double iou_thresh, double frame_dt, int proposal_id) {
  if (T == 0) throw ConfigError("trajectory length T must be >= 1");
  ProposalTrajectory traj;
  traj.proposal_id = proposal_id;
  traj.boxes.resize(T);
  traj.valid.assign(T, false);
  traj.boxes[T - 1] = current;
  traj.valid[T - 1] = true;

  Box7 last = current;
  for (std::size_t lag = 1; lag < T; ++lag) {
    const Box7 projected = proxy_box(last, frame_dt);
    const Box7* best = nullptr;
    double best_iou = -1.0;
    if (lag - 1 < prev_frames.size()) {
      for (const auto& cand : prev_frames[lag - 1]) {
        const double iou = iou_bev(projected, cand);
        if (iou > best_iou) {
          best_iou = iou;
          best = &cand;
        }
      }
    }
    const std::size_t slot = T - 1 - lag;
    if (best && best_iou >= iou_thresh) {
      traj.boxes[slot] = *best;
      // Matched boxes without their own velocity inherit the chain's.
      if (!traj.boxes[slot].velocity) traj.boxes[slot].velocity = last.velocity;
      traj.valid[slot] = true;
    } else {
      traj.boxes[slot] = projected;
      traj.valid[slot] = false;
    }
    last = traj.boxes[slot];
  }
  return traj;
}

}  // namespace ftkn::geometry
