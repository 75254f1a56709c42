#include "ftkn/fusion/schedule.hpp"

#include <string>

#include "ftkn/errors.hpp"
#include "ftkn/scaling/scores.hpp"

namespace ftkn::fusion {

FusionSchedule default_schedule(std::size_t T, std::size_t G, double scale, std::size_t k_out,
                                GroupStrategy strategy) {
  if (T == 0) throw ConfigError("fusion needs at least one sequence");
  FusionSchedule s;
  s.k_out = k_out;
  s.strategy = strategy;
  if (T > G && G > 1) s.stages.push_back({scale, G});
  if (T > 1) s.stages.push_back({scale, 1});
  return s;
}

std::vector<TraceStep> plan_trace(const FusionSchedule& schedule, std::size_t T, std::size_t K) {
  if (T == 0 || K == 0) throw ConfigError("fusion needs non-empty input");
  if (schedule.k_out == 0) throw ConfigError("fusion output length must be positive");
  std::vector<TraceStep> trace;
  std::size_t seqs = T, len = K;
  for (const auto& st : schedule.stages) {
    len = scaling::scaled_length(st.scale, len);
    trace.push_back({seqs, len});
    if (st.groups == 0 || st.groups > seqs || seqs % st.groups != 0)
      throw ConfigError("fusion stage cannot group " + std::to_string(seqs) + " sequences into " +
                        std::to_string(st.groups));
    len *= seqs / st.groups;
    seqs = st.groups;
    trace.push_back({seqs, len});
  }
  if (seqs != 1) throw ConfigError("fusion schedule ends with " + std::to_string(seqs) + " sequences, not one");
  if (schedule.k_out > len)
    throw ConfigError("fusion output length " + std::to_string(schedule.k_out) + " exceeds " + std::to_string(len));
  trace.push_back({1, schedule.k_out});
  return trace;
}

}  // namespace ftkn::fusion
