#include "ftkn/scaling/ad_mhsa.hpp"

#include <cmath>

#include "ftkn/errors.hpp"
#include "ftkn/nn/ops.hpp"
#include "ftkn/scaling/scores.hpp"

namespace ftkn::scaling {

void ScalingConfig::validate() const {
  if (!(keep_ratio > 0.0 && keep_ratio <= 1.0)) throw ConfigError("scaling keep ratio must lie in (0, 1]");
  if (heads == 0) throw ConfigError("scaling needs at least one head");
  if (layers == 0) throw ConfigError("scaling needs at least one layer");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("scaling eta must lie in (0, 1)");
}

AdMhsaLayer AdMhsaLayer::create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                                std::size_t heads, Scorer scorer, Rng& rng, std::uint64_t tag) {
  AdMhsaLayer layer{nn::MultiHeadAttention::create(store, name + ".attn", dim, heads, rng),
                    nn::LayerNorm::create(store, name + ".norm", dim, rng),
                    nn::FeedForward::create(store, name + ".ffn", dim, 2 * dim, rng),
                    std::nullopt,
                    scorer,
                    tag};
  if (scorer == Scorer::supervised) layer.score_head = nn::Linear::create(store, name + ".score", dim, 1, rng);
  if (scorer == Scorer::gumbel_mask) layer.score_head = nn::Linear::create(store, name + ".score", dim, 2, rng);
  return layer;
}

namespace {

std::vector<double> logit_scores(const nn::Tensor& logits, const std::vector<bool>& valid) {
  std::vector<double> s(logits.rows(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!valid[i]) continue;
    // Probability of keeping: sigmoid of the single logit, or of the keep/drop gap.
    const double z = logits.cols() == 1 ? logits.at(i, 0) : logits.at(i, 0) - logits.at(i, 1);
    s[i] = 1.0 / (1.0 + std::exp(-z));
  }
  return s;
}

nn::Tensor finish_block(const AdMhsaLayer& layer, const nn::Tensor& gathered_in, const nn::Tensor& attended,
                        const std::vector<bool>& keep_rows) {
  auto h = layer.norm(nn::add(gathered_in, attended));
  return nn::mask_rows(layer.ffn(h), keep_rows);
}

}  // namespace

ScaleStep AdMhsaLayer::forward(const TokenSequence& seq, std::size_t keep, const ScalingContext& ctx) const {
  seq.check();
  if (seq.size() == 0 || seq.all_padding()) throw EmptyRegionError("scaling layer got only padding tokens");
  if (keep == 0 || keep > seq.size()) throw ConfigError("scaling layer cannot keep " + std::to_string(keep) +
                                                        " of " + std::to_string(seq.size()) + " tokens");
  ScaleStep step;
  step.input_valid = seq.valid_mask();
  step.input_positions = seq.positions;
  const auto& x = seq.features;

  std::optional<nn::Tensor> gates;
  if (score_head) {
    step.head_logits = (*score_head)(x);
    if (scorer == Scorer::gumbel_mask && ctx.training) {
      if (!ctx.rng) throw ConfigError("gumbel scorer needs a random source during training");
      auto g = gumbel_keep_gates(*step.head_logits, ctx.temperature, *ctx.rng);
      std::vector<double> valid(seq.size());
      for (std::size_t i = 0; i < valid.size(); ++i) valid[i] = step.input_valid[i] ? 1.0 : 0.0;
      gates = nn::mul(g, nn::Tensor::from({1, seq.size()}, valid));
      step.keep_gates = gates;
    }
  }

  auto maps = nn::attention_maps(attn, x, x, x, step.input_valid, gates);

  switch (scorer) {
    case Scorer::adaptive:
      step.scores = token_scores(maps.maps, step.input_valid);
      step.kept = select_topk(step.scores, keep);
      break;
    case Scorer::supervised:
    case Scorer::gumbel_mask:
      step.scores = logit_scores(*step.head_logits, step.input_valid);
      step.kept = select_topk(step.scores, keep);
      break;
    case Scorer::random:
      step.scores.assign(seq.size(), 0.0);
      step.kept = random_select(step.input_valid, keep, mix_seed(ctx.seed, tag));
      for (auto i : step.kept) step.scores[i] = 1.0;
      break;
  }

  step.out = seq.select(step.kept);
  auto attended = nn::attend_rows(attn, maps, step.kept);
  step.out.features = finish_block(*this, step.out.features, attended, step.out.valid_mask());
  return step;
}

nn::Tensor AdMhsaLayer::full_block(const TokenSequence& seq) const {
  auto valid = seq.valid_mask();
  auto res = nn::multi_head_attention(attn, seq.features, seq.features, seq.features, valid);
  return finish_block(*this, seq.features, res.out, valid);
}

ScaleStep ad_mhsa(const AdMhsaLayer& layer, const TokenSequence& seq, const ScalingConfig& cfg,
                  const ScalingContext& ctx) {
  cfg.validate();
  return layer.forward(seq, scaled_length(cfg.keep_ratio, seq.size()), ctx);
}

SspCondenser SspCondenser::create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                                  const ScalingConfig& cfg, Rng& rng) {
  cfg.validate();
  SspCondenser ssp;
  ssp.cfg = cfg;
  for (std::size_t l = 0; l < cfg.layers; ++l)
    ssp.layers.push_back(
        AdMhsaLayer::create(store, name + "." + std::to_string(l), dim, cfg.heads, cfg.scorer, rng, l + 1));
  return ssp;
}

std::vector<std::size_t> layer_lengths(std::size_t n, double keep_ratio, std::size_t layers,
                                       std::optional<std::size_t> target) {
  std::vector<std::size_t> out;
  std::size_t prev = n;
  for (std::size_t l = 1; l <= layers; ++l) {
    std::size_t len = scaled_length(std::min(1.0, std::pow(keep_ratio, static_cast<double>(l))), n);
    if (target && l == layers) len = *target;
    if (len == 0 || len > prev)
      throw ConfigError("scaling schedule cannot go from " + std::to_string(prev) + " to " + std::to_string(len));
    out.push_back(len);
    prev = len;
  }
  return out;
}

SspCondenser::Result SspCondenser::condense(const TokenSequence& seq, std::optional<std::size_t> target,
                                            const ScalingContext& ctx) const {
  Result r;
  r.lengths.push_back(seq.size());
  const auto plan = layer_lengths(seq.size(), cfg.keep_ratio, layers.size(), target);
  TokenSequence cur = seq;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto step = layers[l].forward(cur, plan[l], ctx);
    cur = step.out;
    r.lengths.push_back(cur.size());
    r.steps.push_back(std::move(step));
  }
  r.kept_ids = cur.point_ids;
  r.focal = std::move(cur);
  return r;
}

nn::Tensor supervised_head_loss(const std::vector<ScaleStep>& steps, const geometry::Box7& gt, double eta) {
  nn::Tensor total = nn::Tensor::zeros({1, 1});
  std::size_t count = 0;
  for (const auto& s : steps) {
    if (!s.head_logits || s.head_logits->cols() != 1) continue;
    std::vector<std::size_t> rows;
    std::vector<double> targets;
    for (std::size_t i = 0; i < s.input_valid.size(); ++i) {
      if (!s.input_valid[i]) continue;
      rows.push_back(i);
      targets.push_back(supervised_score(s.input_positions[i], gt, eta));
    }
    if (rows.empty()) continue;
    total = nn::add(total, nn::bce_with_logits(nn::gather_rows(*s.head_logits, rows), targets));
    count += rows.size();
  }
  return count ? nn::scale(total, 1.0 / static_cast<double>(count)) : total;
}

nn::Tensor keep_ratio_loss(const std::vector<ScaleStep>& steps, double keep_ratio) {
  nn::Tensor total = nn::Tensor::zeros({1, 1});
  std::size_t layers = 0;
  for (const auto& s : steps) {
    if (!s.keep_gates) continue;
    std::size_t valid = 0;
    for (bool v : s.input_valid) valid += v;
    if (valid == 0) continue;
    auto gap = nn::sub(nn::scale(nn::sum(*s.keep_gates), 1.0 / static_cast<double>(valid)),
                       nn::Tensor::filled({1, 1}, keep_ratio));
    total = nn::add(total, nn::mul(gap, gap));
    ++layers;
  }
  return layers ? nn::scale(total, 1.0 / static_cast<double>(layers)) : total;
}

}  // namespace ftkn::scaling
