#include "ftkn/fusion/msp.hpp"

#include <numeric>

#include "ftkn/errors.hpp"
#include "ftkn/nn/ops.hpp"
#include "ftkn/scaling/scores.hpp"

namespace ftkn::fusion {

MspCondenser MspCondenser::create(nn::ParameterStore& store, const std::string& name, std::size_t dim,
                                  std::size_t heads, scaling::Scorer scorer, const FusionSchedule& schedule,
                                  std::size_t T, std::size_t K, Rng& rng) {
  plan_trace(schedule, T, K);  // validates
  std::vector<scaling::AdMhsaLayer> scalers;
  std::vector<IntraGroupFusion> fusers;
  std::size_t seqs = T;
  for (std::size_t s = 0; s < schedule.stages.size(); ++s) {
    const auto& st = schedule.stages[s];
    const std::string prefix = name + ".stage" + std::to_string(s);
    scalers.push_back(scaling::AdMhsaLayer::create(store, prefix + ".scale", dim, heads, scorer, rng, 100 + s));
    fusers.push_back(IntraGroupFusion::create(store, prefix + ".fuse", dim, seqs / st.groups, rng));
    seqs = st.groups;
  }
  auto final_scaler = scaling::AdMhsaLayer::create(store, name + ".final", dim, heads, scorer, rng, 199);
  return {std::move(scalers), std::move(fusers), std::move(final_scaler), schedule, T, K};
}

namespace {

TokenSequence scale_one(const scaling::AdMhsaLayer& layer, const TokenSequence& seq, std::size_t keep,
                        const scaling::ScalingContext& ctx) {
  if (seq.all_padding()) {
    std::vector<std::size_t> rows(keep);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return seq.select(rows);
  }
  return layer.forward(seq, keep, ctx).out;
}

TokenSequence concat_sequences(const std::vector<TokenSequence>& group) {
  TokenSequence out;
  std::vector<nn::Tensor> parts;
  for (const auto& s : group) {
    parts.push_back(s.features);
    out.point_ids.insert(out.point_ids.end(), s.point_ids.begin(), s.point_ids.end());
    out.positions.insert(out.positions.end(), s.positions.begin(), s.positions.end());
  }
  out.features = nn::concat_rows(parts);
  out.frame_index = group.front().frame_index;
  return out;
}

}  // namespace

MspResult MspCondenser::condense(const std::vector<TokenSequence>& sequences,
                                 const scaling::ScalingContext& ctx) const {
  if (sequences.size() != T)
    throw DimensionError("fusion expects " + std::to_string(T) + " sequences, got " + std::to_string(sequences.size()));
  for (const auto& s : sequences)
    if (s.size() != K) throw DimensionError("fusion sequences must have length " + std::to_string(K));

  MspResult r;
  std::vector<TokenSequence> cur = sequences;
  for (std::size_t s = 0; s < schedule.stages.size(); ++s) {
    const auto& st = schedule.stages[s];
    const std::size_t keep = scaling::scaled_length(st.scale, cur.front().size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      auto local = ctx;
      local.seed = mix_seed(ctx.seed, s, i);
      cur[i] = scale_one(stage_scalers[s], cur[i], keep, local);
    }
    r.trace.push_back({cur.size(), keep});

    const auto plan = group_split(cur.size(), st.groups, schedule.strategy);
    std::vector<TokenSequence> next;
    for (const auto& members : plan.groups) {
      std::vector<TokenSequence> group;
      for (auto m : members) group.push_back(cur[m]);
      next.push_back(plain_concat ? concat_sequences(group) : stage_fusers[s](group));
    }
    cur = std::move(next);
    r.trace.push_back({cur.size(), cur.front().size()});
  }

  auto local = ctx;
  local.seed = mix_seed(ctx.seed, 999);
  r.fused = scale_one(final_scaler, cur.front(), schedule.k_out, local);
  r.trace.push_back({1, r.fused.size()});
  return r;
}

}  // namespace ftkn::fusion
