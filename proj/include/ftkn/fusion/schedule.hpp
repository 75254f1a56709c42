#pragma once

#include <vector>

#include "ftkn/fusion/grouping.hpp"

namespace ftkn::fusion {

/// Alternating condense plan: each stage scales every sequence by `scale`, then
/// fuses the sequences into `groups` groups. A final scaling layer brings the single
/// remaining sequence to `k_out`.
struct FusionSchedule {
  struct Stage {
    double scale = 0.5;
    std::size_t groups = 1;
  };
  std::vector<Stage> stages;
  std::size_t k_out = 48;
  GroupStrategy strategy = GroupStrategy::equal_stride;
};

/// Group into G, then into one (stages skipped when T <= G or T == 1).
FusionSchedule default_schedule(std::size_t T, std::size_t G, double scale, std::size_t k_out,
                                GroupStrategy strategy = GroupStrategy::equal_stride);

struct TraceStep {
  std::size_t sequences = 0;
  std::size_t length = 0;
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// Sequence count and per-sequence length after every scaling and fusion step for
/// T input sequences of length K, ending with (1, k_out). Throws ConfigError when a
/// stage's group count does not divide the current count or the plan does not end
/// with one sequence.
std::vector<TraceStep> plan_trace(const FusionSchedule& schedule, std::size_t T, std::size_t K);

}  // namespace ftkn::fusion
