#include "ftkn/scaling/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ftkn/errors.hpp"

namespace ftkn::scaling {

std::size_t scaled_length(double keep_ratio, std::size_t n) {
  if (!(keep_ratio > 0.0 && keep_ratio <= 1.0)) throw ConfigError("keep ratio must lie in (0, 1]");
  // The small slack keeps exact products such as 0.5 * 192 from rounding up.
  const double raw = std::ceil(keep_ratio * static_cast<double>(n) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

std::vector<double> token_scores(const std::vector<nn::Tensor>& maps, const std::vector<bool>& valid) {
  if (maps.empty()) throw DimensionError("token_scores: no attention maps");
  const std::size_t n = maps.front().rows(), m = maps.front().cols();
  for (const auto& a : maps)
    if (a.rows() != n || a.cols() != m) throw DimensionError("token_scores: head maps differ in shape");
  if (!valid.empty() && (valid.size() != m || n != m))
    throw DimensionError("token_scores: mask length " + std::to_string(valid.size()) + " vs " + std::to_string(m));

  std::vector<double> col(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (!valid.empty() && !valid[j]) continue;
    for (std::size_t i = 0; i < m; ++i) {
      double best = maps.front().at(j, i);
      for (std::size_t h = 1; h < maps.size(); ++h) best = std::max(best, maps[h].at(j, i));
      col[i] += best;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const bool padded = !valid.empty() && !valid[i];
    col[i] = padded ? 0.0 : 1.0 / (1.0 + std::exp(-col[i]));
  }
  return col;
}

std::vector<std::size_t> select_topk(const std::vector<double>& scores, std::size_t count) {
  if (count > scores.size())
    throw ConfigError("select_topk: " + std::to_string(count) + " of " + std::to_string(scores.size()));
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace ftkn::scaling
