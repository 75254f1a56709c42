#include "ftkn/harness/experiments.hpp"

#include <chrono>

#include "ftkn/errors.hpp"
#include "ftkn/scaling/scores.hpp"

namespace ftkn::harness {

std::vector<ProposalSet> eval_proposals(const SyntheticScene& scene, const ExperimentConfig& cfg) {
  return scene_proposals(scene, cfg, mix_seed(scene.seed, 0xe7a1));
}

EvalRun evaluate_model(const Model& model, const std::vector<SyntheticScene>& scenes, const PipelineOptions& opt) {
  EvalRun run;
  for (const auto& scene : scenes) {
    auto props = eval_proposals(scene, model.cfg);
    auto res = run_pipeline(model, scene, props, opt);
    std::map<std::uint32_t, EvalFrame> by_frame;
    for (const auto& b : res.boxes) by_frame[b.frame].boxes.push_back(b);
    for (auto& [f, ef] : by_frame) {
      ef.gt = scene.frames[f].boxes;
      ef.gt_points = scene.object_points[f];
      run.scene_ids.push_back(scene.seed);
      run.frames.push_back(std::move(ef));
    }
    run.telemetry.merge(res.telemetry);
  }
  run.metrics = evaluate(run.frames, model.cfg.eval.match_iou);
  return run;
}

std::string to_string(DropKind k) { return k == DropKind::points ? "points" : "boxes"; }

std::vector<ExperimentReport> robustness_sweep(const Model& model, const std::vector<SyntheticScene>& scenes,
                                               const std::vector<double>& rates) {
  std::vector<ExperimentReport> out;
  for (auto kind : {DropKind::points, DropKind::boxes}) {
    for (double rate : rates) {
      PipelineOptions opt;
      opt.seed = model.cfg.seed;
      (kind == DropKind::points ? opt.point_drop : opt.box_drop) = rate;
      auto run = evaluate_model(model, scenes, opt);
      ExperimentReport r;
      r.tag = to_string(kind) + "@" + format_number(rate).substr(0, 3);
      r.seed = model.cfg.seed;
      r.config = model.cfg.to_json();
      r.metrics["rate"] = rate;
      add_metrics(r, run.metrics);
      r.wall_ms = run.telemetry.wall_ms;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<Variant> ablation_variants(const std::vector<std::string>& groups) {
  using nlohmann::json;
  std::vector<Variant> out;
  auto want = [&](const std::string& g) {
    return groups.empty() || std::find(groups.begin(), groups.end(), g) != groups.end();
  };
  if (want("components")) {
    out.push_back({"components", "full", json::object()});
    out.push_back({"components", "no_ssp_decoder", {{"toggles.ssp_decoder", false}}});
    out.push_back({"components", "no_msp_decoder", {{"toggles.msp_decoder", false}}});
    out.push_back({"components", "concat_instead_of_igf", {{"toggles.igf", false}}});
    out.push_back({"components", "no_motion", {{"toggles.motion", false}}});
  }
  if (want("scorers"))
    for (const char* s : {"adaptive", "supervised", "gumbel_mask", "random"})
      out.push_back({"scorers", std::string("scorer_") + s, {{"scaling.scorer", s}}});
  if (want("frames"))
    for (int T : {4, 8, 16, 24, 32}) out.push_back({"frames", "T" + std::to_string(T), {{"fusion.T", T}}});
  if (want("strategies"))
    for (const char* s : {"equal_stride", "contiguous", "anchored"})
      out.push_back({"strategies", std::string("strategy_") + s, {{"fusion.strategy", s}}});
  if (want("ratios"))
    for (double b1 : {0.3, 0.4, 0.5, 0.6})
      for (double b2 : {0.3, 0.4, 0.5, 0.6})
        out.push_back({"ratios", "beta1_" + format_number(b1).substr(0, 3) + "_beta2_" + format_number(b2).substr(0, 3),
                       {{"scaling.beta1", b1}, {"scaling.beta2", b2}}});
  if (want("sampling"))
    for (double g : {0.25, 0.5, 1.0})
      out.push_back({"sampling", "gamma_" + format_number(g).substr(0, 4), {{"sampling.gamma", g}}});
  return out;
}

ExperimentReport train_and_evaluate(const ExperimentConfig& cfg, const std::string& tag) {
  const auto start = std::chrono::steady_clock::now();
  auto train = generate_dataset(cfg, 0, cfg.scene.train_scenes);
  auto held_out = generate_dataset(cfg, 1, cfg.scene.eval_scenes);
  auto trained = staged_train(train, cfg);
  PipelineOptions opt;
  opt.seed = cfg.seed;
  auto run = evaluate_model(*trained.model, held_out, opt);
  ExperimentReport r;
  r.tag = tag;
  r.seed = cfg.seed;
  r.config = cfg.to_json();
  r.loss_curve = trained.report.loss_curve;
  for (const auto& [k, v] : trained.report.metrics) r.metrics[k] = v;
  add_metrics(r, run.metrics);
  r.metrics["attention_cells_per_proposal"] =
      run.telemetry.refined ? static_cast<double>(run.telemetry.attention_cells) / static_cast<double>(run.telemetry.proposals) : 0.0;
  r.metrics["peak_points_stored"] = static_cast<double>(run.telemetry.peak_stored_points);
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<ExperimentReport> ablation_suite(const ExperimentConfig& base, const std::vector<Variant>& variants,
                                             const std::function<void(std::size_t, const Variant&)>& progress) {
  std::vector<ExperimentReport> out;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (progress) progress(i, variants[i]);
    auto cfg = base;
    apply_config(cfg, variants[i].settings);
    // frame-count variants keep the scene length tied to T
    if (variants[i].settings.contains("fusion.T")) cfg.scene.frames = 0;
    auto r = train_and_evaluate(cfg, variants[i].group + "/" + variants[i].tag);
    out.push_back(std::move(r));
  }
  return out;
}

std::uint64_t analytic_attention_cells(const ExperimentConfig& cfg) {
  const std::uint64_t H = cfg.model.heads;
  const std::size_t K = cfg.sampling.k();
  std::uint64_t cells = 0;
  // current-frame scaling stack
  const auto lengths = scaling::layer_lengths(cfg.sampling.current_samples(), cfg.scaling.beta1, cfg.scaling.layers, K);
  std::size_t n = cfg.sampling.current_samples();
  for (auto len : lengths) {
    cells += H * n * n;
    n = len;
  }
  if (cfg.toggles.ssp_decoder) cells += H * K;
  if (cfg.toggles.msp_decoder) {
    const auto sched = cfg.schedule();
    std::size_t seqs = cfg.fusion.T, len = K;
    for (const auto& st : sched.stages) {
      cells += H * seqs * len * len;
      const std::size_t keep = scaling::scaled_length(st.scale, len);
      len = keep * seqs / st.groups;
      seqs = st.groups;
    }
    cells += H * len * len;
    cells += H * sched.k_out;
  }
  return cells;
}

ExperimentConfig no_scaling_variant(const ExperimentConfig& cfg) {
  auto c = cfg;
  c.sampling.focal = cfg.sampling.current_samples();
  c.sampling.gamma = 1.0;
  c.sampling.oversample = 1;
  c.scaling.beta1 = 1.0;
  c.scaling.beta2 = 1.0;
  c.fusion.stages.reset();
  c.fusion.k_out = c.fusion.T * c.sampling.focal;
  return c;
}

double BenchResult::cells_ratio() const {
  return analytic_default ? static_cast<double>(analytic_no_scaling) / static_cast<double>(analytic_default) : 0.0;
}

double BenchResult::wall_ratio() const { return wall_ms_default > 0 ? wall_ms_no_scaling / wall_ms_default : 0.0; }

ExperimentReport BenchResult::report() const {
  ExperimentReport r;
  r.tag = "bench";
  r.metrics["attention_cells.default"] = static_cast<double>(analytic_default);
  r.metrics["attention_cells.no_scaling"] = static_cast<double>(analytic_no_scaling);
  r.metrics["attention_cells.ratio"] = cells_ratio();
  r.metrics["attention_cells.measured_default"] = static_cast<double>(measured_default);
  r.metrics["attention_cells.measured_no_scaling"] = static_cast<double>(measured_no_scaling);
  r.metrics["points.stored_default"] = static_cast<double>(peak_points_default);
  r.metrics["points.full_cloud"] = static_cast<double>(full_cloud_points);
  r.metrics["proposals"] = static_cast<double>(proposals);
  r.wall_ms = wall_ms_default + wall_ms_no_scaling;
  return r;
}

BenchResult bench_efficiency(const ExperimentConfig& cfg, std::size_t objects) {
  BenchResult b;
  auto scene_cfg = cfg;
  scene_cfg.rpn.fp_rate = 0.0;
  scene_cfg.rpn.recall = 1.0;
  auto scene = generate_scene(scene_cfg, scene_seed(cfg.seed, 2, 0), objects);
  auto props = scene_proposals(scene, scene_cfg, mix_seed(cfg.seed, 0xbe4c));
  const auto plain = no_scaling_variant(cfg);
  b.analytic_default = analytic_attention_cells(cfg);
  b.analytic_no_scaling = analytic_attention_cells(plain);

  auto model = Model::create(cfg, cfg.seed);
  PipelineOptions opt;
  opt.seed = cfg.seed;
  opt.workers = 1;
  auto fast = run_pipeline(*model, scene, props, opt);
  b.wall_ms_default = fast.telemetry.wall_ms;
  b.peak_points_default = fast.telemetry.peak_stored_points;
  b.full_cloud_points = fast.telemetry.full_cloud_points;
  b.proposals = fast.telemetry.proposals;
  if (fast.telemetry.refined) b.measured_default = fast.telemetry.attention_cells / fast.telemetry.refined;
  model.reset();

  auto big = Model::create(plain, cfg.seed);
  opt.history = HistoryMode::full_cloud;
  auto slow = run_pipeline(*big, scene, props, opt);
  b.wall_ms_no_scaling = slow.telemetry.wall_ms;
  if (slow.telemetry.refined) b.measured_no_scaling = slow.telemetry.attention_cells / slow.telemetry.refined;
  return b;
}

}  // namespace ftkn::harness
