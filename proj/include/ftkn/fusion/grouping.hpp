#pragma once

#include <string>
#include <vector>

namespace ftkn::fusion {

enum class GroupStrategy { equal_stride, contiguous, anchored };

GroupStrategy parse_strategy(const std::string& name);
std::string to_string(GroupStrategy s);

/// Index lists into T sequences (0-based; sequence 0 is the current frame).
struct GroupPlan {
  std::size_t T = 0;
  std::size_t G = 0;
  GroupStrategy strategy = GroupStrategy::equal_stride;
  std::vector<std::vector<std::size_t>> groups;
};

/// equal_stride: group g = {g, g+G, g+2G, ...}
/// contiguous:   group g = {g*T/G, ..., (g+1)*T/G - 1}
/// anchored:     group g = {0, (g+1), 2(g+1), ...}, T/G members each, every group
///               shares sequence 0 (overlapping cover).
/// Throws ConfigError unless 1 <= G <= T and G divides T.
GroupPlan group_split(std::size_t T, std::size_t G, GroupStrategy strategy);

}  // namespace ftkn::fusion
