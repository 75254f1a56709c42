#pragma once

#include <string>
#include <vector>

#include "ftkn/harness/evaluate.hpp"
#include "ftkn/harness/report.hpp"
#include "ftkn/harness/train.hpp"

namespace ftkn::harness {

struct EvalRun {
  std::vector<std::uint64_t> scene_ids;
  std::vector<EvalFrame> frames;
  Metrics metrics;
  Telemetry telemetry;
};

/// Runs the pipeline on every scene (last frame refined) with proposals drawn from
/// the scene seed and evaluates against the ground truth.
EvalRun evaluate_model(const Model& model, const std::vector<SyntheticScene>& scenes, const PipelineOptions& opt);

/// Proposal set used for evaluation of a scene (fixed per scene seed).
std::vector<ProposalSet> eval_proposals(const SyntheticScene& scene, const ExperimentConfig& cfg);

enum class DropKind { points, boxes };
std::string to_string(DropKind k);

/// Metrics at each drop rate for both drop kinds, no retraining. Reports are tagged
/// "<kind>@<rate>".
std::vector<ExperimentReport> robustness_sweep(const Model& model, const std::vector<SyntheticScene>& scenes,
                                               const std::vector<double>& rates = {0.0, 0.1, 0.2, 0.3});

/// One ablation run: a tag and the settings it changes.
struct Variant {
  std::string group;
  std::string tag;
  nlohmann::json settings;  // dotted keys
};

/// Groups: "components", "scorers", "frames", "strategies", "ratios", "sampling".
std::vector<Variant> ablation_variants(const std::vector<std::string>& groups);

/// Trains and evaluates every variant on freshly generated data. Each report carries
/// the variant's tag; `progress` receives the variant index before it starts.
std::vector<ExperimentReport> ablation_suite(const ExperimentConfig& base, const std::vector<Variant>& variants,
                                             const std::function<void(std::size_t, const Variant&)>& progress = {});

/// Train on the configured training split and evaluate on the held-out split.
ExperimentReport train_and_evaluate(const ExperimentConfig& cfg, const std::string& tag);

/// Query-key score evaluations of one proposal's refinement, from the shapes alone.
std::uint64_t analytic_attention_cells(const ExperimentConfig& cfg);

/// Same pipeline with every keep ratio at one and full-size history samples.
ExperimentConfig no_scaling_variant(const ExperimentConfig& cfg);

struct BenchResult {
  std::uint64_t analytic_default = 0;
  std::uint64_t analytic_no_scaling = 0;
  std::uint64_t measured_default = 0;  // per refined proposal
  std::uint64_t measured_no_scaling = 0;
  double wall_ms_default = 0.0;
  double wall_ms_no_scaling = 0.0;
  std::size_t peak_points_default = 0;  // focal bank
  std::size_t full_cloud_points = 0;    // raw sweeps over the same window
  std::size_t proposals = 0;

  double cells_ratio() const;
  double wall_ratio() const;
  ExperimentReport report() const;
};

/// Refines a small scene (`objects` objects, no false positives) with and without
/// scaling using the same random weights and seed.
BenchResult bench_efficiency(const ExperimentConfig& cfg, std::size_t objects = 1);

}  // namespace ftkn::harness
