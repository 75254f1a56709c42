#include "ftkn/decoder/loss.hpp"

#include <algorithm>
#include <stdexcept>

#include "ftkn/errors.hpp"
#include "ftkn/geometry/iou.hpp"
#include "ftkn/nn/ops.hpp"

namespace ftkn::decoder {

double confidence_target(double iou) { return std::clamp(2.0 * iou - 0.5, 0.0, 1.0); }

RefinementTarget make_target(const geometry::Box7& proposal, const std::optional<geometry::Box7>& gt,
                             const LossConfig& cfg) {
  RefinementTarget t;
  t.gt = gt;
  if (gt) {
    t.iou = geometry::iou_bev(proposal, *gt);
    t.positive = t.iou >= cfg.positive_iou;
  }
  return t;
}

LossTerms refinement_loss(const PredictionHead::Output& pred, const geometry::Box7& proposal,
                          const RefinementTarget& target, const LossConfig& cfg) {
  if (!(cfg.regression_weight > 0.0)) throw ConfigError("regression weight must be positive");
  if (target.positive && !target.gt) throw std::logic_error("positive refinement target without a box");
  const double conf_target[1] = {confidence_target(target.iou)};
  LossTerms out;
  auto conf = nn::bce_with_logits(pred.logit, conf_target);
  out.confidence = conf.item();
  out.total = conf;
  if (target.positive) {
    const auto enc = encode_box(*target.gt, proposal);
    auto reg = nn::smooth_l1(pred.residual, enc, cfg.smooth_l1_beta);
    out.regression = reg.item();
    out.total = nn::add(conf, nn::scale(reg, cfg.regression_weight));
  }
  return out;
}

}  // namespace ftkn::decoder
