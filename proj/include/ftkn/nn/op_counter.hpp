#pragma once

#include <cstdint>

namespace ftkn::nn {

/// Work and memory accounting for a forward pass.
struct OpCounter {
  std::uint64_t mul_adds = 0;
  /// Query x key score evaluations.
  std::uint64_t attention_cells = 0;
  std::uint64_t peak_live_values = 0;
};

/// Routes op accounting on this thread into `counter` while alive. Nesting restores
/// the outer counter on destruction.
class ScopedOpCounter {
 public:
  explicit ScopedOpCounter(OpCounter& counter);
  ~ScopedOpCounter();
  ScopedOpCounter(const ScopedOpCounter&) = delete;
  ScopedOpCounter& operator=(const ScopedOpCounter&) = delete;

 private:
  OpCounter* previous_;
  std::int64_t baseline_;
};

void count_mul_adds(std::uint64_t n);
void count_attention_cells(std::uint64_t n);
/// Called by tensor storage on allocation (+) and release (-).
void track_live_values(std::int64_t delta);
/// Values currently held by live tensors, process-wide.
std::int64_t live_values();

}  // namespace ftkn::nn
