#include "ftkn/harness/train.hpp"

#include <chrono>
#include <cmath>

#include "ftkn/decoder/loss.hpp"
#include "ftkn/errors.hpp"
#include "ftkn/geometry/iou.hpp"
#include "ftkn/nn/ops.hpp"
#include "ftkn/nn/optim.hpp"

namespace ftkn::harness {

HistoryMode epoch_history(std::size_t epoch, const TrainConfig& cfg) {
  return epoch > cfg.focal_after ? HistoryMode::focal_bank : HistoryMode::full_cloud;
}

std::vector<std::size_t> bank_refresh_epochs(const TrainConfig& cfg) {
  std::vector<std::size_t> out;
  for (auto e : {cfg.focal_after, cfg.refresh_after})
    if (e >= 1 && e < cfg.epochs && (out.empty() || e > out.back())) out.push_back(e);
  return out;
}

std::optional<geometry::Box7> training_target_box(const geometry::Box7& proposal, const std::vector<geometry::Box7>& gt) {
  std::optional<geometry::Box7> best;
  double best_iou = 0.0;
  for (const auto& g : gt) {
    const double iou = geometry::iou_bev(proposal, g);
    if (iou > best_iou) {
      best_iou = iou;
      best = g;
    }
  }
  return best;
}

namespace {

struct Sample {
  std::size_t scene;
  std::size_t frame;
  std::size_t proposal;
};

}  // namespace

TrainResult staged_train(const std::vector<SyntheticScene>& scenes, const ExperimentConfig& cfg,
                         const TrainProgress& progress) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  TrainResult res;
  res.model = Model::create(cfg, cfg.seed);
  Model& model = *res.model;
  const auto& tc = cfg.train;
  const std::size_t T = cfg.fusion.T;

  // proposals and sample order of every epoch up front, so the schedule knows its length
  std::vector<std::vector<std::vector<ProposalSet>>> epoch_props(tc.epochs);
  std::vector<std::vector<Sample>> epoch_samples(tc.epochs);
  std::size_t total_steps = 0;
  for (std::size_t e = 0; e < tc.epochs; ++e) {
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      epoch_props[e].push_back(scene_proposals(scenes[s], cfg, mix_seed(cfg.seed, 0x7a1, e, s)));
      const std::size_t F = scenes[s].frames.size();
      for (std::size_t f = F - std::min(F, tc.frames_per_scene); f < F; ++f)
        for (std::size_t j = 0; j < epoch_props[e][s][f].boxes.size(); ++j) epoch_samples[e].push_back({s, f, j});
    }
    Rng shuffle(mix_seed(cfg.seed, 0x5f1, e));
    std::shuffle(epoch_samples[e].begin(), epoch_samples[e].end(), shuffle.engine());
    total_steps += (epoch_samples[e].size() + tc.batch - 1) / tc.batch;
  }

  std::vector<nn::Tensor> params;
  for (const auto& p : model.store.parameters()) params.push_back(p.tensor);
  nn::AdamOneCycle opt(params, std::max<std::size_t>(total_steps, 1), tc.lr);
  Rng noise(mix_seed(cfg.seed, 0x6b1));

  std::vector<std::vector<geometry::PointSet>> banks;  // per scene, per frame
  const auto refresh = bank_refresh_epochs(tc);
  std::size_t step = 0;
  for (std::size_t e = 0; e < tc.epochs; ++e) {
    const std::size_t epoch = e + 1;
    const auto mode = epoch_history(epoch, tc);
    res.epoch_modes.push_back(mode);
    const auto& props = epoch_props[e];
    const auto& samples = epoch_samples[e];
    double epoch_loss = 0.0;
    std::size_t epoch_batches = 0;
    for (std::size_t b0 = 0; b0 < samples.size(); b0 += tc.batch) {
      model.store.zero_grad();
      nn::Tensor batch_loss = nn::Tensor::zeros({1, 1});
      std::size_t used = 0;
      for (std::size_t i = b0; i < std::min(samples.size(), b0 + tc.batch); ++i) {
        const auto& smp = samples[i];
        const auto& scene = scenes[smp.scene];
        const auto& box = props[smp.scene][smp.frame].boxes[smp.proposal];
        auto traj = proposal_trajectory(props[smp.scene], smp.frame, smp.proposal, T, cfg.sampling.track_iou, 0.0,
                                        cfg.seed);
        std::vector<const geometry::PointSet*> history(T - 1, nullptr);
        for (std::size_t k = 1; k < T && k <= smp.frame; ++k)
          history[k - 1] = mode == HistoryMode::focal_bank ? &banks[smp.scene][smp.frame - k]
                                                           : &scene.frames[smp.frame - k].points;
        ForwardOptions fo;
        fo.seed = mix_seed(cfg.seed, 0xf0, e, i);
        fo.ctx.training = true;
        fo.ctx.rng = &noise;
        fo.ctx.seed = fo.seed;
        fo.ctx.temperature = scaling::gumbel_temperature(
            static_cast<double>(step) / static_cast<double>(std::max<std::size_t>(total_steps, 1)),
            cfg.scaling.temperature_start, cfg.scaling.temperature_end);
        auto fwd = forward_proposal(model, scene.frames[smp.frame].points, traj, history, fo);
        if (!fwd.refined) continue;
        auto gt = training_target_box(box, scene.frames[smp.frame].boxes);
        auto target = decoder::make_target(box, gt, tc.loss);
        auto loss = decoder::refinement_loss(fwd.main, box, target, tc.loss).total;
        if (fwd.aux && tc.aux_head)
          loss = nn::add(loss, nn::scale(decoder::refinement_loss(*fwd.aux, box, target, tc.loss).total, tc.aux_weight));
        if (cfg.scaling.scorer == scaling::Scorer::supervised && gt)
          loss = nn::add(loss, nn::scale(scaling::supervised_head_loss(fwd.ssp.result.steps, *gt, cfg.scaling.eta),
                                         tc.supervised_weight));
        if (cfg.scaling.scorer == scaling::Scorer::gumbel_mask)
          loss = nn::add(loss, nn::scale(scaling::keep_ratio_loss(fwd.ssp.result.steps, cfg.scaling.beta1),
                                         tc.keep_ratio_weight));
        batch_loss = nn::add(batch_loss, loss);
        ++used;
      }
      if (used == 0) {
        ++step;
        continue;
      }
      batch_loss = nn::scale(batch_loss, 1.0 / static_cast<double>(used));
      const double value = batch_loss.item();
      if (!std::isfinite(value)) throw NumericError("training loss is not finite at step " + std::to_string(step));
      batch_loss.backward();
      opt.step();
      res.report.loss_curve.push_back(value);
      epoch_loss += value;
      ++epoch_batches;
      if (progress) progress(epoch, step, value);
      ++step;
    }
    res.report.metrics["epoch" + std::to_string(epoch) + ".loss"] =
        epoch_batches ? epoch_loss / static_cast<double>(epoch_batches) : 0.0;

    if (std::find(refresh.begin(), refresh.end(), epoch) != refresh.end()) {
      // materialize focal points of every training frame with the current model
      PipelineOptions po;
      po.seed = mix_seed(cfg.seed, 0xba4, epoch);
      if (tc.epa) po.epa = EpaOptions{tc.epa_threshold, tc.epa_window, cfg.sampling.k(), true};
      banks.assign(scenes.size(), {});
      for (std::size_t s = 0; s < scenes.size(); ++s)
        banks[s] = materialize_bank(model, scenes[s], epoch_props[std::min(e + 1, tc.epochs - 1)][s], po);
    }
  }
  res.report.tag = "train";
  res.report.seed = cfg.seed;
  res.report.config = cfg.to_json();
  res.report.metrics["train.steps"] = static_cast<double>(res.report.loss_curve.size());
  res.report.metrics["train.scenes"] = static_cast<double>(scenes.size());
  res.report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace ftkn::harness
