#include "ftkn/nn/attention.hpp"

#include <cmath>
#include <numeric>

#include "ftkn/errors.hpp"
#include "ftkn/nn/op_counter.hpp"
#include "ftkn/nn/ops.hpp"

namespace ftkn::nn {

MultiHeadAttention MultiHeadAttention::create(ParameterStore& store, const std::string& name, std::size_t dim,
                                              std::size_t heads, Rng& rng) {
  if (heads == 0 || dim % heads != 0)
    throw ConfigError("attention dim " + std::to_string(dim) + " not divisible by heads " + std::to_string(heads));
  MultiHeadAttention attn;
  attn.query = Linear::create(store, name + ".q", dim, dim, rng);
  attn.key = Linear::create(store, name + ".k", dim, dim, rng);
  attn.value = Linear::create(store, name + ".v", dim, dim, rng);
  attn.output = Linear::create(store, name + ".o", dim, dim, rng);
  attn.heads = heads;
  return attn;
}

AttentionMaps attention_maps(const MultiHeadAttention& attn, const Tensor& q, const Tensor& k, const Tensor& v,
                             const std::vector<bool>& key_valid, const std::optional<Tensor>& key_gates) {
  const std::size_t dim = attn.dim();
  if (attn.heads == 0 || dim % attn.heads != 0) throw ConfigError("attention dim not divisible by heads");
  if (q.cols() != dim || k.cols() != dim || v.cols() != dim || k.rows() != v.rows())
    throw DimensionError("attention operands " + shape_string(q.shape()) + ", " + shape_string(k.shape()) + ", " +
                         shape_string(v.shape()) + " vs dim " + std::to_string(dim));

  const std::size_t hd = attn.head_dim();
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
  Tensor qp = attn.query(q);
  Tensor kp = attn.key(k);
  Tensor vp = attn.value(v);

  AttentionMaps out;
  out.maps.reserve(attn.heads);
  out.values.reserve(attn.heads);
  for (std::size_t h = 0; h < attn.heads; ++h) {
    Tensor qh = slice_cols(qp, h * hd, (h + 1) * hd);
    Tensor kh = slice_cols(kp, h * hd, (h + 1) * hd);
    Tensor logits = scale(matmul_transposed(qh, kh), inv_sqrt);
    out.maps.push_back(key_gates ? softmax_rows_gated(logits, *key_gates) : softmax_rows(logits, key_valid));
    out.values.push_back(slice_cols(vp, h * hd, (h + 1) * hd));
  }
  count_attention_cells(static_cast<std::uint64_t>(attn.heads) * q.rows() * k.rows());
  return out;
}

Tensor attend_rows(const MultiHeadAttention& attn, const AttentionMaps& maps, std::span<const std::size_t> rows) {
  std::vector<Tensor> heads;
  heads.reserve(maps.maps.size());
  for (std::size_t h = 0; h < maps.maps.size(); ++h) {
    heads.push_back(matmul(gather_rows(maps.maps[h], rows), maps.values[h]));
  }
  return attn.output(concat_cols(heads));
}

AttentionResult multi_head_attention(const MultiHeadAttention& attn, const Tensor& q, const Tensor& k,
                                     const Tensor& v, const std::vector<bool>& key_valid) {
  AttentionMaps maps = attention_maps(attn, q, k, v, key_valid);
  std::vector<std::size_t> all(q.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return {attend_rows(attn, maps, all), std::move(maps.maps)};
}

}  // namespace ftkn::nn
