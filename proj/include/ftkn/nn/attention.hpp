#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ftkn/nn/parameter.hpp"

namespace ftkn::nn {

/// Per-head projections plus the output projection.
struct MultiHeadAttention {
  Linear query;
  Linear key;
  Linear value;
  Linear output;
  std::size_t heads = 1;

  /// Throws ConfigError unless dim % heads == 0.
  static MultiHeadAttention create(ParameterStore& store, const std::string& name, std::size_t dim,
                                   std::size_t heads, Rng& rng);
  std::size_t dim() const { return query.in_features(); }
  std::size_t head_dim() const { return dim() / heads; }
};

/// Scaled dot-product maps A_h (Nq x Nk, row-stochastic over valid keys) and the
/// per-head value blocks V_h (Nk x D/H).
struct AttentionMaps {
  std::vector<Tensor> maps;
  std::vector<Tensor> values;
};

/// `key_valid` masks columns additively (-inf). `key_gates`, if given, is a [1 x Nk]
/// multiplicative gate used instead of the boolean mask.
AttentionMaps attention_maps(const MultiHeadAttention& attn, const Tensor& q, const Tensor& k, const Tensor& v,
                             const std::vector<bool>& key_valid = {}, const std::optional<Tensor>& key_gates = {});

/// Concat_h(gather(A_h, rows) V_h) followed by the output projection.
Tensor attend_rows(const MultiHeadAttention& attn, const AttentionMaps& maps, std::span<const std::size_t> rows);

struct AttentionResult {
  Tensor out;
  std::vector<Tensor> maps;
};

/// Full multi-head attention over every query row.
AttentionResult multi_head_attention(const MultiHeadAttention& attn, const Tensor& q, const Tensor& k,
                                     const Tensor& v, const std::vector<bool>& key_valid = {});

}  // namespace ftkn::nn
