#pragma once

#include <functional>

#include "ftkn/geometry/box.hpp"
#include "ftkn/geometry/point_set.hpp"
#include "ftkn/nn/tensor.hpp"
#include "ftkn/types.hpp"

namespace ftkn::geometry {

/// Maps raw per-point features to D-dimensional tokens (an MLP, or a stub in tests).
using Embedder = std::function<nn::Tensor(const nn::Tensor&)>;

inline constexpr std::size_t kOffsetFeatures = 27;

/// N x (27 + extra_dim): offsets p_i - b_j to the 9 box keypoints, then the extras.
/// Padding rows are all zero.
nn::Tensor geometry_features(const PointSet& sample, const Box7& box);

/// N x 28: offsets p_i - b_j to the current box keypoints, then the timestamp.
/// Padding rows are all zero.
nn::Tensor motion_features(const PointSet& hist, const Box7& current_box);

/// Tokens from geometry_features; padding rows come out exactly zero.
TokenSequence geometry_embed(const PointSet& sample, const Box7& box, const Embedder& mlp, int frame_index = 0);

/// Tokens from motion_features; the caller adds these to the geometry tokens.
TokenSequence motion_embed(const PointSet& hist, const Box7& current_box, const Embedder& mlp, int frame_index = 0);

}  // namespace ftkn::geometry
