#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ftkn/nn/tensor.hpp"

namespace ftkn::nn {

// All ops take and return 2-D tensors unless stated otherwise; rank-1 inputs are
// treated as a single row.

/// a[N x K] * b[K x M]
Tensor matmul(const Tensor& a, const Tensor& b);
/// a[N x K] * b[M x K]^T
Tensor matmul_transposed(const Tensor& a, const Tensor& b);
/// x[N x Din] * w[Din x Dout] + bias[Dout], bias broadcast over rows.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Elementwise product of equal shapes.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

/// Row softmax, stabilized by row-max subtraction. `key_valid`, when given, marks
/// usable columns; masked columns get probability 0. A row with no usable column
/// comes out all zero.
Tensor softmax_rows(const Tensor& x, const std::vector<bool>& key_valid = {});

/// Softmax with multiplicative per-column gates g[1 x M]:
/// p_ij = g_j exp(x_ij) / sum_k g_k exp(x_ik). Differentiable in both x and g.
Tensor softmax_rows_gated(const Tensor& x, const Tensor& gates);

/// Per-row standardization followed by gain/shift.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps = 1e-5);

struct MaxPoolResult {
  Tensor pooled;  // [1 x D]
  std::vector<std::size_t> argmax;
};
/// Channelwise max over rows. Ties resolve to the first row; backward follows argmax.
MaxPoolResult max_pool_seq(const Tensor& x);

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);
/// out[i] = x[rows[i]]
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows);
/// Tiles a single row `count` times.
Tensor repeat_row(const Tensor& row, std::size_t count);
/// Reinterprets the row-major buffer under a new shape of equal size.
Tensor reshape(const Tensor& x, Shape shape);
/// Zeroes rows whose flag is false.
Tensor mask_rows(const Tensor& x, const std::vector<bool>& keep);

/// Scalar [1 x 1] sum of all entries.
Tensor sum(const Tensor& x);

/// Sum over entries of binary cross-entropy between sigmoid(logits) and targets.
Tensor bce_with_logits(const Tensor& logits, std::span<const double> targets);
/// Sum over entries of smooth-L1(pred - target) with transition `beta`.
Tensor smooth_l1(const Tensor& pred, std::span<const double> targets, double beta);

}  // namespace ftkn::nn
