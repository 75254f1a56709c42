#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ftkn/decoder/dual_decoder.hpp"
#include "ftkn/fusion/msp.hpp"
#include "ftkn/geometry/trajectory.hpp"
#include "ftkn/harness/epa.hpp"
#include "ftkn/harness/mock_rpn.hpp"
#include "ftkn/harness/model.hpp"
#include "ftkn/harness/scene_gen.hpp"

namespace ftkn::harness {

/// Where historical points come from: the raw sweeps or the focal point bank.
enum class HistoryMode { full_cloud, focal_bank };

/// Mock detections for every frame of a scene.
std::vector<ProposalSet> scene_proposals(const SyntheticScene& scene, const ExperimentConfig& cfg,
                                         std::uint64_t seed);

/// Current-frame branch for one proposal.
struct SspRun {
  geometry::PointSet sample{1};  // oversampled region, padded to 4K rows
  scaling::SspCondenser::Result result;
  geometry::PointSet focal{1};   // the K surviving points, padding rows kept
  bool empty = true;             // the region held no point
};

SspRun run_ssp(const Model& model, const geometry::PointSet& cloud, const geometry::Box7& box, std::uint64_t seed,
               const scaling::ScalingContext& ctx);

struct ForwardOptions {
  scaling::ScalingContext ctx;
  std::uint64_t seed = 0;
  double point_drop = 0.0;  // fraction of historical region points removed before sampling
};

struct ProposalForward {
  bool refined = false;  // false: empty region, no network output
  SspRun ssp;
  std::vector<TokenSequence> sequences;  // MSP inputs, current frame first
  fusion::MspResult msp;
  decoder::PredictionHead::Output main;
  std::optional<decoder::PredictionHead::Output> aux;
};

/// Full refinement forward for one proposal. `history[k - 1]` is the point source
/// for frame (current - k); nullptr means the frame precedes the scene and yields a
/// padding sequence. Pass `precomputed` to reuse a current-frame branch.
ProposalForward forward_proposal(const Model& model, const geometry::PointSet& current_cloud,
                                 const geometry::ProposalTrajectory& trajectory,
                                 const std::vector<const geometry::PointSet*>& history, const ForwardOptions& opt,
                                 const SspRun* precomputed = nullptr);

struct PipelineOptions {
  HistoryMode history = HistoryMode::focal_bank;
  std::uint64_t seed = 0;
  double point_drop = 0.0;
  double box_drop = 0.0;
  /// Frames to refine; default is the last frame.
  std::optional<std::vector<std::size_t>> refine_frames;
  /// Training-time densification when building the bank.
  std::optional<EpaOptions> epa;
  std::size_t workers = 0;
  /// First frame the stream saw: earlier frames never entered the bank, so their
  /// history falls back to raw sweeps (cold start).
  std::size_t stream_start = 0;
};

struct RefinedBox {
  std::uint32_t frame = 0;
  int proposal_index = 0;
  int source = -1;  // ground-truth index the proposal came from, -1 for false positives
  geometry::Box7 proposal;
  geometry::Box7 refined;
  double confidence = 0.0;
  bool refined_flag = false;
};

struct Telemetry {
  std::vector<std::size_t> ssp_lengths;     // token count before and after each SSP layer
  std::vector<fusion::TraceStep> msp_trace;  // sequences x length after every MSP step
  bool traces_consistent = true;             // every refined proposal followed the same trace
  std::uint64_t attention_cells = 0;         // refinement forwards
  std::uint64_t attention_cells_total = 0;   // including bank building on history frames
  std::uint64_t mul_adds = 0;
  std::size_t peak_stored_points = 0;
  std::size_t full_cloud_points = 0;  // raw points spanned by the same frame window
  std::size_t proposals = 0;
  std::size_t refined = 0;
  std::size_t passthrough = 0;
  std::size_t cold_start_frames = 0;  // history frames sampled from raw sweeps
  double wall_ms = 0.0;

  void merge(const Telemetry& other);
};

struct PipelineResult {
  std::vector<RefinedBox> boxes;
  Telemetry telemetry;
};

/// Streams the scene frame by frame: every frame's proposals go through the current-frame
/// branch and their focal points enter the bank; selected frames are then refined
/// against the bank. Inference only (no gradients); per-proposal work runs in parallel.
PipelineResult run_pipeline(const Model& model, const SyntheticScene& scene, const std::vector<ProposalSet>& proposals,
                            const PipelineOptions& opt);

/// Focal points (own plus borrowed) of every frame, as the bank would hold them.
std::vector<geometry::PointSet> materialize_bank(const Model& model, const SyntheticScene& scene,
                                                 const std::vector<ProposalSet>& proposals, const PipelineOptions& opt);

/// Trajectory of proposal `index` of frame `frame` over the earlier frames' proposals,
/// with each earlier box dropped with probability `box_drop`.
geometry::ProposalTrajectory proposal_trajectory(const std::vector<ProposalSet>& proposals, std::size_t frame,
                                                 std::size_t index, std::size_t T, double track_iou,
                                                 double box_drop, std::uint64_t seed);

}  // namespace ftkn::harness
