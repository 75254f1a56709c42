#pragma once

#include <span>
#include <string>

#include "ftkn/nn/parameter.hpp"
#include "ftkn/types.hpp"

namespace ftkn::fusion {

/// Intra-group fusion for groups of a fixed size. Each sequence is max-pooled over its
/// real tokens; the pooled vectors are concatenated and projected, then split back into
/// one summary token per sequence. Every token is concatenated with its sequence's
/// summary, compressed back to D by a shared pointwise linear, added to the original
/// token and normalized. Padding rows stay zero.
struct IntraGroupFusion {
  nn::Linear summary;   // (size*D) -> (size*D)
  nn::Linear compress;  // 2D -> D
  nn::LayerNorm norm;
  std::size_t group_size = 0;

  static IntraGroupFusion create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                                 std::size_t group_size, Rng& rng);

  /// Throws DimensionError when the group size, lengths or widths disagree.
  TokenSequence operator()(std::span<const TokenSequence> group) const;
};

}  // namespace ftkn::fusion
