#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ftkn::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Graph node behind a Tensor. Values are immutable once the producing op returns;
/// only `grad` is written afterwards, by the backward sweep.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  Node(Shape s, std::vector<double> v);
  ~Node();
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  /// Grad buffer, allocated on first use.
  std::vector<double>& grad_buffer();
};

/// Row-major f64 tensor with reverse-mode differentiation.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, double value);
  static Tensor from(Shape shape, std::vector<double> values);
  /// 2-D tensor from nested rows; all rows must have equal length.
  static Tensor matrix(const std::vector<std::vector<double>>& rows);
  /// Leaf that accumulates gradients.
  static Tensor leaf(Shape shape, std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  /// Row count of a 2-D tensor (1 for a rank-1 tensor).
  std::size_t rows() const;
  /// Column count of a 2-D tensor (length for a rank-1 tensor).
  std::size_t cols() const;

  std::span<const double> data() const { return node_->value; }
  /// Writable view, for leaves only (parameters and test inputs).
  std::span<double> mutable_data();
  double at(std::size_t i) const { return node_->value[i]; }
  double at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  /// Gradient after backward(); zeros if nothing flowed here.
  std::span<const double> grad() const;
  void zero_grad();

  /// Backpropagates from this scalar (single-element) tensor.
  void backward() const;

  /// Same values, cut from the graph.
  Tensor detach() const;

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// True while ops should record backward closures on this thread.
bool grad_enabled();

/// Disables graph recording for the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

namespace detail {

/// Builds an op result. When grad mode is on and some parent needs a gradient, the
/// parents and backward closure are attached. Throws NumericError on non-finite output.
Tensor make_result(Shape shape, std::vector<double> values, std::vector<Tensor> parents,
                   std::function<void(Node&)> backward_fn, const char* op_name);

}  // namespace detail

}  // namespace ftkn::nn
