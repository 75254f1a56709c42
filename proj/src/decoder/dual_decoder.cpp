#include "ftkn/decoder/dual_decoder.hpp"

#include <cmath>

#include "ftkn/errors.hpp"
#include "ftkn/nn/ops.hpp"

namespace ftkn::decoder {

DualDecoder DualDecoder::create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                                std::size_t heads, Rng& rng) {
  return {store.create(name + ".query", {1, dim}, nn::InitScheme::uniform_fan_in, rng),
          nn::MultiHeadAttention::create(store, name + ".single.attn", dim, heads, rng),
          nn::FeedForward::create(store, name + ".single.ffn", dim, 2 * dim, rng),
          nn::MultiHeadAttention::create(store, name + ".multi.attn", dim, heads, rng),
          nn::FeedForward::create(store, name + ".multi.ffn", dim, 2 * dim, rng)};
}

namespace {

nn::Tensor decode_layer(const nn::MultiHeadAttention& attn, const nn::FeedForward& ffn, const nn::Tensor& q,
                        const TokenSequence& keys, const char* what) {
  keys.check();
  if (keys.size() == 0 || keys.all_padding()) throw ConfigError(std::string("decoder needs real ") + what + " tokens");
  auto res = nn::multi_head_attention(attn, q, keys.features, keys.features, keys.valid_mask());
  return ffn(nn::add(q, res.out));
}

}  // namespace

nn::Tensor DualDecoder::decode_single(const TokenSequence& single) const {
  return decode_layer(single_attn, single_ffn, query, single, "current-frame");
}

nn::Tensor DualDecoder::decode_multi(const nn::Tensor& q, const TokenSequence& multi) const {
  return decode_layer(multi_attn, multi_ffn, q, multi, "multi-frame");
}

DecodedQueries DualDecoder::operator()(const TokenSequence& single, const TokenSequence& multi) const {
  auto qs = decode_single(single);
  return {qs, decode_multi(qs, multi)};
}

PredictionHead PredictionHead::create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                                      Rng& rng) {
  return {nn::Mlp::create(store, name + ".conf", dim, dim, 1, rng),
          nn::Mlp::create(store, name + ".reg", dim, dim, 7, rng)};
}

double PredictionHead::Output::confidence() const { return 1.0 / (1.0 + std::exp(-logit.item())); }

Residual PredictionHead::Output::residual_values() const {
  Residual r{};
  for (std::size_t i = 0; i < 7; ++i) r[i] = residual.at(i);
  return r;
}

PredictionHead::Output PredictionHead::operator()(const nn::Tensor& q) const {
  return {confidence(q), regression(q)};
}

}  // namespace ftkn::decoder
