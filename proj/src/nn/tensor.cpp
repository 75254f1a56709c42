#include "ftkn/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "ftkn/errors.hpp"
#include "ftkn/nn/op_counter.hpp"

namespace ftkn::nn {

namespace {
thread_local bool t_grad_enabled = true;
}

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

Node::Node(Shape s, std::vector<double> v) : shape(std::move(s)), value(std::move(v)) {
  if (value.size() != shape_size(shape)) {
    throw DimensionError("tensor data length " + std::to_string(value.size()) + " does not match shape " +
                         shape_string(shape));
  }
  track_live_values(static_cast<std::int64_t>(value.size()));
}

Node::~Node() { track_live_values(-static_cast<std::int64_t>(value.size() + grad.size())); }

std::vector<double>& Node::grad_buffer() {
  if (grad.empty() && !value.empty()) {
    grad.assign(value.size(), 0.0);
    track_live_values(static_cast<std::int64_t>(grad.size()));
  }
  return grad;
}

Tensor Tensor::zeros(Shape shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(Shape shape, double value) {
  auto n = shape_size(shape);
  return Tensor(std::make_shared<Node>(std::move(shape), std::vector<double>(n, value)));
}

Tensor Tensor::from(Shape shape, std::vector<double> values) {
  return Tensor(std::make_shared<Node>(std::move(shape), std::move(values)));
}

Tensor Tensor::matrix(const std::vector<std::vector<double>>& rows) {
  std::size_t r = rows.size();
  std::size_t c = r ? rows.front().size() : 0;
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged rows in Tensor::matrix");
    values.insert(values.end(), row.begin(), row.end());
  }
  return from({r, c}, std::move(values));
}

Tensor Tensor::leaf(Shape shape, std::vector<double> values) {
  Tensor t = from(std::move(shape), std::move(values));
  t.node_->requires_grad = true;
  return t;
}

std::size_t Tensor::rows() const {
  const auto& s = node_->shape;
  if (s.size() == 1) return 1;
  if (s.size() != 2) throw DimensionError("rows() needs rank <= 2, got " + shape_string(s));
  return s[0];
}

std::size_t Tensor::cols() const {
  const auto& s = node_->shape;
  if (s.size() == 1) return s[0];
  if (s.size() != 2) throw DimensionError("cols() needs rank <= 2, got " + shape_string(s));
  return s[1];
}

std::span<double> Tensor::mutable_data() {
  if (!node_->parents.empty()) throw std::logic_error("mutable_data() on a non-leaf tensor");
  return node_->value;
}

double Tensor::item() const {
  if (size() != 1) throw DimensionError("item() on tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

std::span<const double> Tensor::grad() const { return node_->grad_buffer(); }

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::backward() const {
  if (size() != 1) throw DimensionError("backward() needs a scalar, got " + shape_string(shape()));
  if (!node_->requires_grad) return;

  // Reverse topological order by iterative post-order DFS.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn) n->backward_fn(*n);
  }
  for (Node* n : order) {
    for (double g : n->grad) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient in backward pass");
    }
  }
}

Tensor Tensor::detach() const { return from(node_->shape, node_->value); }

bool grad_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

namespace detail {

Tensor make_result(Shape shape, std::vector<double> values, std::vector<Tensor> parents,
                   std::function<void(Node&)> backward_fn, const char* op_name) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite value produced by ") + op_name);
  }
  auto node = std::make_shared<Node>(std::move(shape), std::move(values));
  if (t_grad_enabled) {
    bool needs = std::any_of(parents.begin(), parents.end(), [](const Tensor& p) { return p.requires_grad(); });
    if (needs) {
      node->requires_grad = true;
      node->parents.reserve(parents.size());
      for (auto& p : parents) node->parents.push_back(p.node());
      node->backward_fn = std::move(backward_fn);
    }
  }
  return Tensor(std::move(node));
}

}  // namespace detail

}  // namespace ftkn::nn
