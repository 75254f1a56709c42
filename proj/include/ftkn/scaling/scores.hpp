#pragma once

#include <cstddef>
#include <vector>

#include "ftkn/nn/tensor.hpp"

namespace ftkn::scaling {

/// Output length of one scaling step: ceil(ratio * n), never below 1.
std::size_t scaled_length(double keep_ratio, std::size_t n);

/// Attention received by each token as a key: S_i = sigmoid(sum over valid queries j
/// of max over heads of A_h[j, i]). Padded tokens score 0. `valid` may be empty
/// (everything valid). Scores are plain numbers; selection is not differentiated.
std::vector<double> token_scores(const std::vector<nn::Tensor>& maps, const std::vector<bool>& valid = {});

/// Indices of the `count` highest scores in ascending index order. Equal scores favor
/// the lower index. Throws ConfigError when count exceeds the number of scores.
std::vector<std::size_t> select_topk(const std::vector<double>& scores, std::size_t count);

}  // namespace ftkn::scaling
