#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ftkn/harness/model.hpp"
#include "ftkn/harness/pipeline.hpp"
#include "ftkn/harness/report.hpp"

namespace ftkn::harness {

/// Which history source an epoch uses: raw sweeps first, then the materialized bank.
HistoryMode epoch_history(std::size_t epoch, const TrainConfig& cfg);
/// Epochs (1-based) after which the bank is rebuilt with the current model.
std::vector<std::size_t> bank_refresh_epochs(const TrainConfig& cfg);

/// The ground-truth box a training proposal regresses to: the one of highest BEV IoU.
std::optional<geometry::Box7> training_target_box(const geometry::Box7& proposal, const std::vector<geometry::Box7>& gt);

struct TrainResult {
  std::unique_ptr<Model> model;
  ExperimentReport report;
  std::vector<HistoryMode> epoch_modes;
};

/// Per-step progress callback: (epoch, step, loss).
using TrainProgress = std::function<void(std::size_t, std::size_t, double)>;

/// Staged training on `scenes`. Single-threaded. Proposals are re-drawn every epoch
/// (box jitter). Deterministic in (cfg, seed).
TrainResult staged_train(const std::vector<SyntheticScene>& scenes, const ExperimentConfig& cfg,
                         const TrainProgress& progress = {});

}  // namespace ftkn::harness
