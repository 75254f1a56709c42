#include "ftkn/fusion/igf.hpp"

#include "ftkn/errors.hpp"
#include "ftkn/nn/ops.hpp"

namespace ftkn::fusion {

IntraGroupFusion IntraGroupFusion::create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                                          std::size_t group_size, Rng& rng) {
  if (group_size == 0) throw ConfigError("fusion group size must be positive");
  return {nn::Linear::create(store, name + ".summary", group_size * dim, group_size * dim, rng),
          nn::Linear::create(store, name + ".compress", 2 * dim, dim, rng),
          nn::LayerNorm::create(store, name + ".norm", dim, rng), group_size};
}

namespace {

nn::Tensor pool_real_rows(const TokenSequence& seq) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (!seq.is_padding(i)) rows.push_back(i);
  if (rows.empty()) return nn::Tensor::zeros({1, seq.dim()});
  if (rows.size() == seq.size()) return nn::max_pool_seq(seq.features).pooled;
  return nn::max_pool_seq(nn::gather_rows(seq.features, rows)).pooled;
}

}  // namespace

TokenSequence IntraGroupFusion::operator()(std::span<const TokenSequence> group) const {
  if (group.size() != group_size)
    throw DimensionError("fusion expects groups of " + std::to_string(group_size) + ", got " +
                         std::to_string(group.size()));
  const std::size_t len = group.front().size(), dim = group.front().dim();
  if (summary.in_features() != group_size * dim) throw DimensionError("fusion width mismatch");
  for (const auto& s : group) {
    s.check();
    if (s.size() != len || s.dim() != dim) throw DimensionError("ragged fusion group");
  }

  std::vector<nn::Tensor> pooled;
  for (const auto& s : group) pooled.push_back(pool_real_rows(s));
  auto mixed = summary(nn::concat_cols(pooled));  // [1 x size*D]

  TokenSequence out;
  out.frame_index = group.front().frame_index;
  std::vector<nn::Tensor> blocks;
  for (std::size_t s = 0; s < group.size(); ++s) {
    auto token = nn::slice_cols(mixed, s * dim, (s + 1) * dim);
    std::vector<nn::Tensor> parts{group[s].features, nn::repeat_row(token, len)};
    auto fused = nn::add(group[s].features, compress(nn::concat_cols(parts)));
    blocks.push_back(nn::mask_rows(norm(fused), group[s].valid_mask()));
    out.point_ids.insert(out.point_ids.end(), group[s].point_ids.begin(), group[s].point_ids.end());
    out.positions.insert(out.positions.end(), group[s].positions.begin(), group[s].positions.end());
  }
  out.features = nn::concat_rows(blocks);
  return out;
}

}  // namespace ftkn::fusion
