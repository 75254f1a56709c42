#pragma once

#include <string>
#include <vector>

#include "ftkn/fusion/igf.hpp"
#include "ftkn/fusion/schedule.hpp"
#include "ftkn/scaling/ad_mhsa.hpp"

namespace ftkn::fusion {

struct MspResult {
  TokenSequence fused;
  std::vector<TraceStep> trace;
};

/// Multi-frame condensation: per stage, one scaling layer shared by all sequences and
/// one fusion block shared by all groups; a final scaling layer yields k_out tokens.
struct MspCondenser {
  std::vector<scaling::AdMhsaLayer> stage_scalers;
  std::vector<IntraGroupFusion> stage_fusers;
  scaling::AdMhsaLayer final_scaler;
  FusionSchedule schedule;
  std::size_t T = 0;
  std::size_t K = 0;
  /// Ablation switch: groups are merged by row concatenation instead of fusion.
  bool plain_concat = false;

  /// Throws ConfigError when the schedule does not fit T sequences of length K.
  static MspCondenser create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                             std::size_t heads, scaling::Scorer scorer, const FusionSchedule& schedule,
                             std::size_t T, std::size_t K, Rng& rng);

  /// `sequences[0]` is the current frame. A sequence made only of padding skips
  /// attention and keeps its leading rows.
  MspResult condense(const std::vector<TokenSequence>& sequences, const scaling::ScalingContext& ctx) const;
};

}  // namespace ftkn::fusion
