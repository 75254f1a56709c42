#include "ftkn/nn/parameter.hpp"

#include <cmath>

#include "ftkn/errors.hpp"
#include "ftkn/nn/ops.hpp"

namespace ftkn::nn {

Tensor ParameterStore::create(const std::string& name, Shape shape, InitScheme init, Rng& rng) {
  if (find(name)) throw ConfigError("duplicate parameter name: " + name);
  std::vector<double> values(shape_size(shape), 0.0);
  switch (init) {
    case InitScheme::uniform_fan_in: {
      double bound = 1.0 / std::sqrt(static_cast<double>(shape.empty() ? 1 : shape[0]));
      for (auto& v : values) v = rng.uniform(-bound, bound);
      break;
    }
    case InitScheme::ones:
      std::fill(values.begin(), values.end(), 1.0);
      break;
    case InitScheme::zeros:
      break;
  }
  Tensor t = Tensor::leaf(std::move(shape), std::move(values));
  params_.push_back({name, t, init});
  return t;
}

const Parameter* ParameterStore::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return &p;
  return nullptr;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.tensor.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

Linear Linear::create(ParameterStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
                      InitScheme weight_init) {
  return {store.create(name + ".weight", {in, out}, weight_init, rng),
          store.create(name + ".bias", {out}, InitScheme::zeros, rng)};
}

Tensor Linear::operator()(const Tensor& x) const { return linear(x, weight, bias); }

LayerNorm LayerNorm::create(ParameterStore& store, const std::string& name, std::size_t dim, Rng& rng) {
  return {store.create(name + ".gain", {dim}, InitScheme::ones, rng),
          store.create(name + ".shift", {dim}, InitScheme::zeros, rng)};
}

Tensor LayerNorm::operator()(const Tensor& x) const { return layer_norm(x, gain, shift); }

Mlp Mlp::create(ParameterStore& store, const std::string& name, std::size_t in, std::size_t hidden,
                std::size_t out, Rng& rng) {
  auto first = Linear::create(store, name + ".0", in, hidden, rng);
  auto second = Linear::create(store, name + ".1", hidden, out, rng);
  return {std::move(first), std::move(second)};
}

Tensor Mlp::operator()(const Tensor& x) const { return second(relu(first(x))); }

FeedForward FeedForward::create(ParameterStore& store, const std::string& name, std::size_t dim,
                                std::size_t hidden, Rng& rng) {
  auto up = Linear::create(store, name + ".up", dim, hidden, rng);
  auto down = Linear::create(store, name + ".down", hidden, dim, rng);
  auto norm = LayerNorm::create(store, name + ".norm", dim, rng);
  return {std::move(up), std::move(down), std::move(norm)};
}

Tensor FeedForward::operator()(const Tensor& x) const { return norm(add(x, down(relu(up(x))))); }

}  // namespace ftkn::nn
