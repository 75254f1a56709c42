#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftkn/geometry/box.hpp"
#include "ftkn/nn/attention.hpp"
#include "ftkn/nn/parameter.hpp"
#include "ftkn/scaling/scorers.hpp"
#include "ftkn/types.hpp"

namespace ftkn::scaling {

struct ScalingConfig {
  std::size_t heads = 4;
  double keep_ratio = 0.5;
  Scorer scorer = Scorer::adaptive;
  std::size_t layers = 2;
  double eta = 0.2;  // supervised-score ramp half-width

  /// Throws ConfigError on a ratio outside (0, 1] or zero heads/layers.
  void validate() const;
};

/// Per-call state that is not a model parameter.
struct ScalingContext {
  bool training = false;
  double temperature = 1.0;  // gumbel_mask only
  Rng* rng = nullptr;        // gumbel noise; required when training with gumbel_mask
  std::uint64_t seed = 0;    // random scorer
};

/// Everything one scaling layer produced, including what the auxiliary losses need.
struct ScaleStep {
  TokenSequence out;
  std::vector<std::size_t> kept;        // rows of the input, ascending
  std::vector<double> scores;           // per input row
  std::optional<nn::Tensor> head_logits;  // supervised [N x 1] or gumbel [N x 2]
  std::optional<nn::Tensor> keep_gates;   // gumbel training gates [1 x N]
  std::vector<Vec3> input_positions;
  std::vector<bool> input_valid;
};

/// Attention over every token, then only the selected rows continue:
/// gather -> residual from the gathered input -> norm -> feed-forward block.
struct AdMhsaLayer {
  nn::MultiHeadAttention attn;
  nn::LayerNorm norm;
  nn::FeedForward ffn;
  std::optional<nn::Linear> score_head;
  Scorer scorer = Scorer::adaptive;
  std::uint64_t tag = 0;

  static AdMhsaLayer create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                            std::size_t heads, Scorer scorer, Rng& rng, std::uint64_t tag = 0);

  /// Keeps `keep` rows. Throws EmptyRegionError if every token is padding.
  ScaleStep forward(const TokenSequence& seq, std::size_t keep, const ScalingContext& ctx) const;
  /// Same block applied to all rows with no selection; used by oracles and for ratio 1.
  nn::Tensor full_block(const TokenSequence& seq) const;
};

/// One scaling layer at ratio cfg.keep_ratio.
ScaleStep ad_mhsa(const AdMhsaLayer& layer, const TokenSequence& seq, const ScalingConfig& cfg,
                  const ScalingContext& ctx = {});

/// Stack of scaling layers condensing 4K tokens of the current frame to K.
struct SspCondenser {
  std::vector<AdMhsaLayer> layers;
  ScalingConfig cfg;

  static SspCondenser create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                             const ScalingConfig& cfg, Rng& rng);

  /// Layer l keeps ceil(ratio^l * N) rows; the last layer keeps exactly `target`
  /// when given. Lengths include the input length first.
  struct Result {
    TokenSequence focal;
    std::vector<PointId> kept_ids;
    std::vector<std::size_t> lengths;
    std::vector<ScaleStep> steps;
  };
  Result condense(const TokenSequence& seq, std::optional<std::size_t> target, const ScalingContext& ctx) const;
};

/// Planned per-layer output lengths for a stack (without the input length).
std::vector<std::size_t> layer_lengths(std::size_t n, double keep_ratio, std::size_t layers,
                                       std::optional<std::size_t> target);

/// BCE between the supervised head and point-in-box targets, averaged over valid tokens.
nn::Tensor supervised_head_loss(const std::vector<ScaleStep>& steps, const geometry::Box7& gt, double eta);
/// Squared gap between the mean keep gate and the keep ratio, averaged over layers.
nn::Tensor keep_ratio_loss(const std::vector<ScaleStep>& steps, double keep_ratio);

}  // namespace ftkn::scaling
