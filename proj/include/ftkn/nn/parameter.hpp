#pragma once

#include <string>
#include <vector>

#include "ftkn/nn/tensor.hpp"
#include "ftkn/rng.hpp"

namespace ftkn::nn {

enum class InitScheme { uniform_fan_in, zeros, ones };

struct Parameter {
  std::string name;
  Tensor tensor;
  InitScheme init = InitScheme::zeros;
};

/// Owns every trainable tensor of a model, in creation order. Names are unique.
class ParameterStore {
 public:
  /// uniform_fan_in draws from U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with fan_in = shape[0].
  Tensor create(const std::string& name, Shape shape, InitScheme init, Rng& rng);

  const std::vector<Parameter>& parameters() const { return params_; }
  std::vector<Parameter>& parameters() { return params_; }
  const Parameter* find(const std::string& name) const;
  std::size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<Parameter> params_;
};

/// y = xW + b
struct Linear {
  Tensor weight;
  Tensor bias;

  static Linear create(ParameterStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
                       InitScheme weight_init = InitScheme::uniform_fan_in);
  Tensor operator()(const Tensor& x) const;
  std::size_t in_features() const { return weight.rows(); }
  std::size_t out_features() const { return weight.cols(); }
};

struct LayerNorm {
  Tensor gain;
  Tensor shift;

  static LayerNorm create(ParameterStore& store, const std::string& name, std::size_t dim, Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

/// Two linear layers with a ReLU between them.
struct Mlp {
  Linear first;
  Linear second;

  static Mlp create(ParameterStore& store, const std::string& name, std::size_t in, std::size_t hidden,
                    std::size_t out, Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

/// Post-norm position-wise feed-forward: LN(x + W2 relu(W1 x)).
struct FeedForward {
  Linear up;
  Linear down;
  LayerNorm norm;

  static FeedForward create(ParameterStore& store, const std::string& name, std::size_t dim, std::size_t hidden,
                            Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

}  // namespace ftkn::nn
