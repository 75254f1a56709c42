#include "ftkn/fusion/grouping.hpp"

#include "ftkn/errors.hpp"

namespace ftkn::fusion {

GroupStrategy parse_strategy(const std::string& name) {
  if (name == "equal_stride") return GroupStrategy::equal_stride;
  if (name == "contiguous") return GroupStrategy::contiguous;
  if (name == "anchored") return GroupStrategy::anchored;
  throw ConfigError("unknown grouping strategy '" + name + "'");
}

std::string to_string(GroupStrategy s) {
  switch (s) {
    case GroupStrategy::equal_stride: return "equal_stride";
    case GroupStrategy::contiguous: return "contiguous";
    case GroupStrategy::anchored: return "anchored";
  }
  return "?";
}

GroupPlan group_split(std::size_t T, std::size_t G, GroupStrategy strategy) {
  if (G == 0 || G > T || T % G != 0)
    throw ConfigError("cannot split " + std::to_string(T) + " sequences into " + std::to_string(G) + " groups");
  GroupPlan plan{T, G, strategy, std::vector<std::vector<std::size_t>>(G)};
  const std::size_t per = T / G;
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t k = 0; k < per; ++k) {
      switch (strategy) {
        case GroupStrategy::equal_stride: plan.groups[g].push_back(g + k * G); break;
        case GroupStrategy::contiguous: plan.groups[g].push_back(g * per + k); break;
        case GroupStrategy::anchored: plan.groups[g].push_back(k * (g + 1)); break;
      }
    }
  return plan;
}

}  // namespace ftkn::fusion
