#pragma once

#include <string>

#include "ftkn/decoder/box_coder.hpp"
#include "ftkn/nn/attention.hpp"
#include "ftkn/nn/parameter.hpp"
#include "ftkn/types.hpp"

namespace ftkn::decoder {

struct DecodedQueries {
  nn::Tensor single;  // after attending the current-frame tokens [1 x D]
  nn::Tensor multi;   // after attending the fused history tokens [1 x D]
};

/// Two cross-attention layers driven by one learned query: the first reads the
/// current-frame tokens, the second reads the fused multi-frame tokens.
struct DualDecoder {
  nn::Tensor query;
  nn::MultiHeadAttention single_attn;
  nn::FeedForward single_ffn;
  nn::MultiHeadAttention multi_attn;
  nn::FeedForward multi_ffn;

  static DualDecoder create(nn::ParameterStore& store, const std::string& name, std::size_t dim, std::size_t heads,
                            Rng& rng);

  /// Padded keys are masked. Throws ConfigError when either sequence is empty or
  /// has no real token.
  DecodedQueries operator()(const TokenSequence& single, const TokenSequence& multi) const;
  /// First layer only.
  nn::Tensor decode_single(const TokenSequence& single) const;
  /// Second layer only, driven by an arbitrary [1 x D] query.
  nn::Tensor decode_multi(const nn::Tensor& q, const TokenSequence& multi) const;
};

/// Confidence logit and box residual from one decoded query.
struct PredictionHead {
  nn::Mlp confidence;  // D -> D -> 1
  nn::Mlp regression;  // D -> D -> 7

  static PredictionHead create(nn::ParameterStore& store, const std::string& name, std::size_t dim, Rng& rng);

  struct Output {
    nn::Tensor logit;     // [1 x 1]
    nn::Tensor residual;  // [1 x 7]
    double confidence() const;
    Residual residual_values() const;
  };
  Output operator()(const nn::Tensor& q) const;
};

}  // namespace ftkn::decoder
