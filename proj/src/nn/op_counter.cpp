#include "ftkn/nn/op_counter.hpp"

#include <algorithm>
#include <atomic>

namespace ftkn::nn {

namespace {
thread_local OpCounter* t_active = nullptr;
thread_local std::int64_t t_baseline = 0;
std::atomic<std::int64_t> g_live{0};
}  // namespace

ScopedOpCounter::ScopedOpCounter(OpCounter& counter) : previous_(t_active), baseline_(t_baseline) {
  t_active = &counter;
  t_baseline = g_live.load(std::memory_order_relaxed);
}

ScopedOpCounter::~ScopedOpCounter() {
  t_active = previous_;
  t_baseline = baseline_;
}

void count_mul_adds(std::uint64_t n) {
  if (t_active) t_active->mul_adds += n;
}

void count_attention_cells(std::uint64_t n) {
  if (t_active) t_active->attention_cells += n;
}

void track_live_values(std::int64_t delta) {
  auto now = g_live.fetch_add(delta, std::memory_order_relaxed) + delta;
  if (t_active && delta > 0) {
    auto above = static_cast<std::uint64_t>(std::max<std::int64_t>(0, now - t_baseline));
    t_active->peak_live_values = std::max(t_active->peak_live_values, above);
  }
}

std::int64_t live_values() { return g_live.load(std::memory_order_relaxed); }

}  // namespace ftkn::nn
