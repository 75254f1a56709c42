#pragma once

#include <optional>

#include "ftkn/decoder/dual_decoder.hpp"

namespace ftkn::decoder {

struct LossConfig {
  double regression_weight = 2.0;  // weight of the box term against the confidence term
  double positive_iou = 0.55;
  double smooth_l1_beta = 1.0 / 9.0;
};

/// Confidence target for a proposal: clamp(2 * IoU - 0.5, 0, 1).
double confidence_target(double iou);

struct RefinementTarget {
  std::optional<geometry::Box7> gt;
  double iou = 0.0;  // proposal vs gt
  bool positive = false;
};

/// Target for a proposal matched (or not) to a ground-truth box.
RefinementTarget make_target(const geometry::Box7& proposal, const std::optional<geometry::Box7>& gt,
                             const LossConfig& cfg);

struct LossTerms {
  nn::Tensor total;
  double confidence = 0.0;
  double regression = 0.0;
};

/// BCE(confidence) + weight * smooth-L1(residual vs encoded gt), the latter only for
/// positives. Throws std::logic_error for a positive without a ground-truth box.
LossTerms refinement_loss(const PredictionHead::Output& pred, const geometry::Box7& proposal,
                          const RefinementTarget& target, const LossConfig& cfg);

}  // namespace ftkn::decoder
