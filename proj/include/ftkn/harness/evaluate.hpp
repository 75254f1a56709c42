#pragma once

#include <array>
#include <string>
#include <vector>

#include "ftkn/harness/pipeline.hpp"

namespace ftkn::harness {

/// Refined boxes of one frame against its ground truth.
struct EvalFrame {
  std::vector<RefinedBox> boxes;
  std::vector<geometry::Box7> gt;
  std::vector<std::size_t> gt_points;  // object points per ground-truth box
};

/// Point-count buckets standing in for difficulty levels.
inline constexpr std::array<const char*, 3> kBucketNames = {"sparse", "medium", "dense"};
std::size_t point_bucket(std::size_t points);

struct BoxMatch {
  int gt = -1;  // matched ground-truth index in its frame, -1 if unmatched
  double iou_before = 0.0;
  double iou_after = 0.0;
};

struct BucketStats {
  std::size_t gt = 0;
  std::size_t matched = 0;
  double iou_before = 0.0;  // means over matched boxes
  double iou_after = 0.0;
};

struct Metrics {
  std::size_t gt = 0;
  std::size_t proposals = 0;
  std::size_t matched = 0;
  double mean_iou_before = 0.0;
  double mean_iou_after = 0.0;
  double recall50_before = 0.0;  // over ground-truth boxes
  double recall50_after = 0.0;
  double recall70_before = 0.0;
  double recall70_after = 0.0;
  std::array<BucketStats, 3> buckets{};
  std::vector<std::vector<BoxMatch>> matches;  // per frame, per box
};

/// Greedy matching in descending proposal-score order (ties: lower index first): each
/// proposal takes the unmatched ground-truth box of highest BEV IoU with it when that
/// IoU reaches `match_iou`. The association is fixed by the proposals, so before and
/// after scores compare the same pairs.
Metrics evaluate(const std::vector<EvalFrame>& frames, double match_iou);

}  // namespace ftkn::harness
