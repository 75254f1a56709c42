#include "ftkn/harness/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <unordered_map>

#include "ftkn/errors.hpp"
#include "ftkn/geometry/sampling.hpp"
#include "ftkn/memory/dedup.hpp"
#include "ftkn/memory/focal_store.hpp"
#include "ftkn/nn/op_counter.hpp"
#include "ftkn/nn/ops.hpp"
#include "ftkn/harness/thread_pool.hpp"

namespace ftkn::harness {

using geometry::PointSet;

std::vector<ProposalSet> scene_proposals(const SyntheticScene& scene, const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<ProposalSet> out;
  for (std::size_t f = 0; f < scene.frames.size(); ++f)
    out.push_back(mock_rpn(scene.frames[f].boxes, cfg.rpn, cfg.scene, mix_seed(seed, 0x4e9, f)));
  return out;
}

void Telemetry::merge(const Telemetry& o) {
  if (ssp_lengths.empty()) {
    ssp_lengths = o.ssp_lengths;
    msp_trace = o.msp_trace;
  } else if (!o.ssp_lengths.empty() && (o.ssp_lengths != ssp_lengths || o.msp_trace != msp_trace)) {
    traces_consistent = false;
  }
  traces_consistent = traces_consistent && o.traces_consistent;
  attention_cells += o.attention_cells;
  attention_cells_total += o.attention_cells_total;
  mul_adds += o.mul_adds;
  peak_stored_points = std::max(peak_stored_points, o.peak_stored_points);
  full_cloud_points = std::max(full_cloud_points, o.full_cloud_points);
  proposals += o.proposals;
  refined += o.refined;
  passthrough += o.passthrough;
  cold_start_frames += o.cold_start_frames;
  wall_ms += o.wall_ms;
}

SspRun run_ssp(const Model& model, const PointSet& cloud, const geometry::Box7& box, std::uint64_t seed,
               const scaling::ScalingContext& ctx) {
  const auto& cfg = model.cfg;
  SspRun run;
  auto sample = geometry::cylindrical_sample(cloud, box, cfg.sampling.current_samples(), seed);
  run.sample = std::move(sample.points);
  run.focal = PointSet(run.sample.extra_dim);
  run.empty = std::none_of(sample.pad_mask.begin(), sample.pad_mask.end(), [](bool b) { return b; });
  if (run.empty) return run;
  auto tokens = geometry::geometry_embed(run.sample, box, model.geometry_embedder(), 0);
  auto local = ctx;
  local.seed = mix_seed(seed, 0x55);
  run.result = model.ssp.condense(tokens, cfg.sampling.k(), local);
  std::unordered_map<PointId, std::size_t> row_of;
  for (std::size_t i = 0; i < run.sample.size(); ++i)
    if (run.sample.ids[i] != kPadId) row_of.emplace(run.sample.ids[i], i);
  for (auto id : run.result.kept_ids) {
    if (id == kPadId)
      run.focal.push_padding();
    else
      run.focal.push_row(run.sample, row_of.at(id));
  }
  return run;
}

namespace {

PointSet with_timestamp(PointSet pts, double ts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts.ids[i] != kPadId) pts.timestamps[i] = ts;
  return pts;
}

PointSet padding_rows(std::size_t n, std::size_t extra_dim) {
  PointSet p(extra_dim);
  for (std::size_t i = 0; i < n; ++i) p.push_padding();
  return p;
}

// K points from the region of `box`, after dropping each region point with probability `drop`.
PointSet history_sample(const PointSet& source, const geometry::Box7& box, std::size_t K, double drop,
                        std::uint64_t seed) {
  if (drop <= 0.0) return geometry::cylindrical_sample(source, box, K, seed).points;
  Rng rng(mix_seed(seed, 0xd409));
  PointSet kept(source.extra_dim);
  for (auto row : geometry::cylinder_members(source, box))
    if (!rng.bernoulli(drop)) kept.push_row(source, row);
  return geometry::cylindrical_sample(kept, box, K, seed).points;
}

TokenSequence embed_frame(const Model& model, const PointSet& pts, const geometry::Box7& frame_box,
                          const geometry::Box7& current_box, int frame_index) {
  auto g = geometry::geometry_embed(pts, frame_box, model.geometry_embedder(), frame_index);
  if (!model.cfg.toggles.motion) return g;
  auto m = geometry::motion_embed(pts, current_box, model.motion_embedder(), frame_index);
  g.features = nn::add(g.features, m.features);
  return g;
}

}  // namespace

ProposalForward forward_proposal(const Model& model, const PointSet& current_cloud,
                                 const geometry::ProposalTrajectory& trajectory,
                                 const std::vector<const PointSet*>& history, const ForwardOptions& opt,
                                 const SspRun* precomputed) {
  const auto& cfg = model.cfg;
  const std::size_t T = cfg.fusion.T, K = cfg.sampling.k();
  if (trajectory.length() != T) throw DimensionError("trajectory length must equal T");
  if (history.size() + 1 < T) throw DimensionError("history needs T - 1 entries");
  const auto& box = trajectory.boxes.back();

  ProposalForward out;
  out.ssp = precomputed ? *precomputed : run_ssp(model, current_cloud, box, mix_seed(opt.seed, 1), opt.ctx);
  if (out.ssp.empty) return out;
  out.refined = true;

  const auto& tg = cfg.toggles;
  nn::Tensor qs = tg.ssp_decoder ? model.decoder.decode_single(out.ssp.result.focal) : model.decoder.query;
  nn::Tensor qm = qs;
  if (tg.msp_decoder) {
    out.sequences.reserve(T);
    out.sequences.push_back(embed_frame(model, with_timestamp(out.ssp.focal, 0.0), box, box, 0));
    for (std::size_t k = 1; k < T; ++k) {
      const auto& frame_box = trajectory.boxes[T - 1 - k];
      const PointSet* src = history[k - 1];
      PointSet pts = src ? history_sample(*src, frame_box, K, opt.point_drop, mix_seed(opt.seed, 2, k))
                         : padding_rows(K, current_cloud.extra_dim);
      pts = with_timestamp(std::move(pts), -static_cast<double>(k) * geometry::kFrameDt);
      out.sequences.push_back(embed_frame(model, pts, frame_box, box, -static_cast<int>(k)));
    }
    auto local = opt.ctx;
    local.seed = mix_seed(opt.seed, 3);
    out.msp = model.msp.condense(out.sequences, local);
    qm = model.decoder.decode_multi(qs, out.msp.fused);
  }
  out.main = model.head(qm);
  if (tg.ssp_decoder && tg.msp_decoder) out.aux = model.aux_head(qs);
  return out;
}

geometry::ProposalTrajectory proposal_trajectory(const std::vector<ProposalSet>& proposals, std::size_t frame,
                                                 std::size_t index, std::size_t T, double track_iou,
                                                 double box_drop, std::uint64_t seed) {
  std::vector<std::vector<geometry::Box7>> prev;
  for (std::size_t k = 1; k < T && k <= frame; ++k) {
    const auto& boxes = proposals[frame - k].boxes;
    if (box_drop <= 0.0) {
      prev.push_back(boxes);
      continue;
    }
    Rng rng(mix_seed(seed, 0xb0c5, frame - k));
    std::vector<geometry::Box7> kept;
    for (const auto& b : boxes)
      if (!rng.bernoulli(box_drop)) kept.push_back(b);
    prev.push_back(std::move(kept));
  }
  return geometry::build_trajectory(proposals[frame].boxes[index], prev, T, track_iou, geometry::kFrameDt,
                                    static_cast<int>(index));
}

namespace {

struct SceneRun {
  const Model& model;
  const SyntheticScene& scene;
  const std::vector<ProposalSet>& proposals;
  const PipelineOptions& opt;
  memory::FocalStore store;
  std::map<std::size_t, PointSet> merged;  // bank view per frame: own then borrowed points
  Telemetry tel;
  std::vector<std::uint64_t> ssp_cells;  // per proposal of the last built frame

  SceneRun(const Model& m, const SyntheticScene& s, const std::vector<ProposalSet>& p, const PipelineOptions& o)
      : model(m), scene(s), proposals(p), opt(o), store(std::max<std::size_t>(m.cfg.fusion.T, 1)) {}

  std::uint64_t proposal_seed(std::size_t frame, std::size_t j) const {
    return mix_seed(opt.seed ^ scene.seed, 0x9a11, frame, j);
  }

  scaling::ScalingContext context(std::size_t frame, std::size_t j) const {
    scaling::ScalingContext ctx;
    ctx.seed = proposal_seed(frame, j);
    return ctx;
  }

  // current-frame branch for every proposal, then the frame's focal points enter the bank
  std::vector<SspRun> build_frame(std::size_t f) {
    const auto& cloud = scene.frames[f].points;
    const auto& props = proposals[f].boxes;
    std::vector<SspRun> runs(props.size());
    std::vector<nn::OpCounter> counters(props.size());
    parallel_for(
        props.size(),
        [&](std::size_t j) {
          nn::NoGradGuard no_grad;
          nn::ScopedOpCounter count(counters[j]);
          runs[j] = run_ssp(model, cloud, props[j], mix_seed(proposal_seed(f, j), 1), context(f, j));
        },
        opt.workers);
    ssp_cells.clear();
    for (const auto& c : counters) {
      tel.attention_cells_total += c.attention_cells;
      ssp_cells.push_back(c.attention_cells);
    }

    std::vector<PointSet> samples;
    memory::IndexMatrix selected;
    for (const auto& r : runs) samples.push_back(r.sample);
    auto unique = memory::assign_unique_ids(samples);
    for (std::size_t j = 0; j < runs.size(); ++j) {
      std::unordered_map<PointId, std::size_t> slot;
      for (std::size_t i = 0; i < runs[j].sample.size(); ++i)
        if (runs[j].sample.ids[i] != kPadId) slot.emplace(runs[j].sample.ids[i], i);
      std::vector<memory::RowIndex> rows;
      for (std::size_t i = 0; i < runs[j].focal.size(); ++i)
        rows.push_back(runs[j].focal.ids[i] == kPadId ? memory::kNoRow
                                                       : unique.index[j][slot.at(runs[j].focal.ids[i])]);
      selected.push_back(std::move(rows));
    }
    const auto idx = static_cast<std::uint32_t>(f);
    store.store(idx, memory::finalize_focal(selected, unique.points));
    if (opt.epa && opt.epa->training) {
      std::vector<const PointSet*> clouds;
      for (const auto& fr : scene.frames) clouds.push_back(&fr.points);
      auto extra = epa_augment(clouds, f, props, *opt.epa, mix_seed(opt.seed ^ scene.seed, 0xe9a, f));
      if (!extra.empty()) store.augment(idx, extra);
    }
    auto fetched = store.fetch(idx);
    PointSet view = fetched->points;
    for (std::size_t i = 0; i < fetched->augmented.size(); ++i) view.push_row(fetched->augmented, i);
    merged[f] = std::move(view);
    // the bank keeps a window of T frames; drop merged views that fell out of it
    while (!merged.empty() && !store.contains(static_cast<std::uint32_t>(merged.begin()->first)))
      merged.erase(merged.begin());
    tel.peak_stored_points = std::max(tel.peak_stored_points, store.peak_stored_points());
    std::size_t raw = 0;
    for (const auto& [g, _] : merged) raw += scene.frames[g].points.size();
    tel.full_cloud_points = std::max(tel.full_cloud_points, raw);
    return runs;
  }

  void refine_frame(std::size_t f, const std::vector<SspRun>* runs, std::vector<RefinedBox>& out) {
    const auto& cfg = model.cfg;
    const std::size_t T = cfg.fusion.T;
    const auto& cloud = scene.frames[f].points;
    const auto& props = proposals[f];
    std::vector<const PointSet*> history(T > 0 ? T - 1 : 0, nullptr);
    for (std::size_t k = 1; k < T && k <= f; ++k) {
      if (opt.history == HistoryMode::focal_bank) {
        auto it = merged.find(f - k);
        if (it != merged.end()) {
          history[k - 1] = &it->second;
          continue;
        }
      }
      history[k - 1] = &scene.frames[f - k].points;  // raw sweep: cold start or full-cloud mode
      if (opt.history == HistoryMode::focal_bank) ++tel.cold_start_frames;
    }

    std::vector<RefinedBox> boxes(props.boxes.size());
    std::vector<nn::OpCounter> counters(props.boxes.size());
    std::vector<Telemetry> per(props.boxes.size());
    parallel_for(
        props.boxes.size(),
        [&](std::size_t j) {
          nn::NoGradGuard no_grad;
          nn::ScopedOpCounter count(counters[j]);
          auto traj = proposal_trajectory(proposals, f, j, T, cfg.sampling.track_iou, opt.box_drop,
                                          opt.seed ^ scene.seed);
          ForwardOptions fo;
          fo.ctx = context(f, j);
          fo.seed = proposal_seed(f, j);
          fo.point_drop = opt.point_drop;
          auto fwd = forward_proposal(model, cloud, traj, history, fo, runs ? &(*runs)[j] : nullptr);
          auto& b = boxes[j];
          b.frame = static_cast<std::uint32_t>(f);
          b.proposal_index = static_cast<int>(j);
          b.source = props.source[j];
          b.proposal = props.boxes[j];
          b.refined = props.boxes[j];
          b.refined_flag = fwd.refined;
          if (fwd.refined) {
            b.refined = decoder::decode_box(props.boxes[j], fwd.main.residual_values());
            b.refined.score = fwd.main.confidence();
            b.confidence = fwd.main.confidence();
            per[j].ssp_lengths = fwd.ssp.result.lengths;
            per[j].msp_trace = fwd.msp.trace;
          }
        },
        opt.workers);
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      // a reused current-frame branch still belongs to this refinement
      per[j].attention_cells = counters[j].attention_cells + (runs ? ssp_cells[j] : 0);
      per[j].attention_cells_total = counters[j].attention_cells;
      per[j].mul_adds = counters[j].mul_adds;
      ++per[j].proposals;
      ++(boxes[j].refined_flag ? per[j].refined : per[j].passthrough);
      tel.merge(per[j]);
      out.push_back(boxes[j]);
    }
  }
};

std::vector<std::size_t> refine_set(const SyntheticScene& scene, const PipelineOptions& opt) {
  std::vector<std::size_t> frames = opt.refine_frames.value_or(std::vector<std::size_t>{});
  if (!opt.refine_frames && !scene.frames.empty()) frames.push_back(scene.frames.size() - 1);
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
  for (auto f : frames)
    if (f >= scene.frames.size()) throw ConfigError("refine frame out of range");
  return frames;
}

}  // namespace

PipelineResult run_pipeline(const Model& model, const SyntheticScene& scene, const std::vector<ProposalSet>& proposals,
                            const PipelineOptions& opt) {
  if (proposals.size() != scene.frames.size()) throw DimensionError("one proposal set per frame expected");
  const auto start = std::chrono::steady_clock::now();
  nn::NoGradGuard no_grad;
  SceneRun run(model, scene, proposals, opt);
  PipelineResult result;
  const auto frames = refine_set(scene, opt);
  const std::size_t T = model.cfg.fusion.T;
  std::set<std::size_t> wanted(frames.begin(), frames.end());
  if (!frames.empty()) {
    for (std::size_t f = 0; f <= frames.back(); ++f) {
      const bool refine = wanted.count(f) > 0;
      // bank frames only matter inside the window of some later refined frame
      bool needed = refine;
      for (auto r : frames) needed = needed || (r >= f && r - f < T);
      if (opt.history == HistoryMode::focal_bank && needed && f >= opt.stream_start) {
        auto runs = run.build_frame(f);
        if (refine) run.refine_frame(f, &runs, result.boxes);
      } else if (refine) {
        run.refine_frame(f, nullptr, result.boxes);
      }
    }
  }
  result.telemetry = run.tel;
  result.telemetry.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<PointSet> materialize_bank(const Model& model, const SyntheticScene& scene,
                                       const std::vector<ProposalSet>& proposals, const PipelineOptions& opt) {
  if (proposals.size() != scene.frames.size()) throw DimensionError("one proposal set per frame expected");
  nn::NoGradGuard no_grad;
  SceneRun run(model, scene, proposals, opt);
  std::vector<PointSet> out;
  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    run.build_frame(f);
    out.push_back(run.merged.at(f));
  }
  return out;
}

}  // namespace ftkn::harness
