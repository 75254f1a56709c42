#pragma once

#include <cstddef>
#include <vector>

#include "ftkn/nn/tensor.hpp"

namespace ftkn::nn {

/// One-cycle schedule: linear warm-up from peak/10 to peak over the first 30% of
/// steps, then cosine decay to peak/1000 at `total_steps`.
double one_cycle_lr(std::size_t step, std::size_t total_steps, double peak_lr);

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam driven by the one-cycle schedule. Reads each parameter's accumulated grad.
class AdamOneCycle {
 public:
  AdamOneCycle(std::vector<Tensor> params, std::size_t total_steps, double peak_lr, AdamSettings settings = {});

  /// Applies one update at the current step and advances the step counter.
  void step();
  /// Same update with an explicit gradient per parameter (rank-aligned with params).
  void step(const std::vector<std::vector<double>>& grads);

  std::size_t step_count() const { return step_; }
  double current_lr() const { return one_cycle_lr(step_, total_steps_, peak_lr_); }

 private:
  void apply(std::size_t index, std::span<const double> grad, double lr, double bc1, double bc2);

  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t total_steps_;
  double peak_lr_;
  AdamSettings settings_;
  std::size_t step_ = 0;
};

}  // namespace ftkn::nn
