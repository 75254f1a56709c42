#include "ftkn/nn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ftkn/errors.hpp"

namespace ftkn::nn {

double one_cycle_lr(std::size_t step, std::size_t total_steps, double peak_lr) {
  if (total_steps == 0) return peak_lr;
  step = std::min(step, total_steps);
  const double start = peak_lr / 10.0;
  const double floor = peak_lr / 1000.0;
  const double warm = 0.3 * static_cast<double>(total_steps);
  const double s = static_cast<double>(step);
  if (s < warm) return start + (peak_lr - start) * s / warm;
  const double span = static_cast<double>(total_steps) - warm;
  const double progress = span > 0 ? (s - warm) / span : 1.0;
  return floor + (peak_lr - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamOneCycle::AdamOneCycle(std::vector<Tensor> params, std::size_t total_steps, double peak_lr,
                           AdamSettings settings)
    : params_(std::move(params)), total_steps_(total_steps), peak_lr_(peak_lr), settings_(settings) {
  for (const auto& p : params_) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void AdamOneCycle::apply(std::size_t index, std::span<const double> grad, double lr, double bc1, double bc2) {
  auto values = params_[index].mutable_data();
  auto& m = m_[index];
  auto& v = v_[index];
  for (std::size_t i = 0; i < values.size(); ++i) {
    m[i] = settings_.beta1 * m[i] + (1.0 - settings_.beta1) * grad[i];
    v[i] = settings_.beta2 * v[i] + (1.0 - settings_.beta2) * grad[i] * grad[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    values[i] -= lr * mhat / (std::sqrt(vhat) + settings_.eps);
  }
}

void AdamOneCycle::step() {
  const double lr = current_lr();
  ++step_;
  const double bc1 = 1.0 - std::pow(settings_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(settings_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params_.size(); ++i) apply(i, params_[i].grad(), lr, bc1, bc2);
}

void AdamOneCycle::step(const std::vector<std::vector<double>>& grads) {
  if (grads.size() != params_.size()) throw DimensionError("AdamOneCycle::step: gradient count mismatch");
  const double lr = current_lr();
  ++step_;
  const double bc1 = 1.0 - std::pow(settings_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(settings_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (grads[i].size() != params_[i].size()) throw DimensionError("AdamOneCycle::step: gradient size mismatch");
    apply(i, grads[i], lr, bc1, bc2);
  }
}

}  // namespace ftkn::nn
