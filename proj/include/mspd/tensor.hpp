/*
 * Copyright 2026 the mspd authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef MSPD_TENSOR_HPP
#define MSPD_TENSOR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mspd/common.hpp"

namespace mspd {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

template <class T>
class Tensor;

namespace detail {
inline thread_local int no_grad_depth = 0;
}

inline bool grad_enabled() { return detail::no_grad_depth == 0; }

// Scoped switch that drops graph construction entirely (evaluation paths).
struct NoGradGuard {
  NoGradGuard() { ++detail::no_grad_depth; }
  ~NoGradGuard() { --detail::no_grad_depth; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

// One node of the dynamically built computation graph. Values are written
// once by the op that creates the node; only leaf parameters are ever
// mutated afterwards (by the optimizer, between graphs).
template <class T>
struct TensorNode {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // allocated lazily, same extent as data
  bool requires_grad = false;
  std::vector<Tensor<T>> parents;
  std::function<void(TensorNode<T>&)> backprop;  // pulls this->grad, pushes into parents

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
  }
};

// Value-semantics handle to a graph node.
template <class T>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    return filled(std::move(shape), T(0), requires_grad);
  }

  static Tensor filled(Shape shape, T value, bool requires_grad = false) {
    auto n = std::make_shared<TensorNode<T>>();
    n->data.assign(static_cast<std::size_t>(shape_numel(shape)), value);
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor from(Shape shape, std::vector<T> values, bool requires_grad = false) {
    require(shape_numel(shape) == static_cast<std::int64_t>(values.size()),
            "tensor: shape ", shape_str(shape), " does not match buffer of ", values.size(),
            " elements");
    auto n = std::make_shared<TensorNode<T>>();
    n->shape = std::move(shape);
    n->data = std::move(values);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor scalar(T value, bool requires_grad = false) {
    return from(Shape{}, {value}, requires_grad);
  }

  static Tensor uniform(Shape shape, T lo, T hi, Rng& rng, bool requires_grad = false) {
    auto t = zeros(std::move(shape), requires_grad);
    for (auto& x : t.node_->data) x = static_cast<T>(rng.uniform(lo, hi));
    return t;
  }

  bool valid() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::int64_t dim(std::size_t i) const { return node_->shape[i]; }
  std::size_t ndim() const { return node_->shape.size(); }
  std::int64_t numel() const { return node_->numel(); }
  bool requires_grad() const { return node_->requires_grad; }

  const std::vector<T>& data() const { return node_->data; }
  const std::vector<T>& grad() const { return node_->grad; }
  bool has_grad() const { return !node_->grad.empty(); }

  // scalar convenience
  T value() const {
    require(node_->numel() == 1, "tensor: value() on non-scalar of shape ", shape_str(shape()));
    return node_->data[0];
  }

  // Mutation is reserved for leaves (parameter init, optimizer updates,
  // finite-difference probes). Never mutate an interior node of a live graph.
  std::vector<T>& mutable_data() { return node_->data; }

  void set_requires_grad(bool rg) {
    node_->requires_grad = rg;
    if (!rg) node_->grad.clear();
  }

  void zero_grad() {
    if (node_->requires_grad) node_->grad.assign(node_->data.size(), T(0));
  }

  TensorNode<T>* node() const { return node_.get(); }
  const std::shared_ptr<TensorNode<T>>& handle() const { return node_; }

  explicit Tensor(std::shared_ptr<TensorNode<T>> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<TensorNode<T>> node_;
};

namespace detail {

template <class T>
void topo_visit(TensorNode<T>* n, std::unordered_set<TensorNode<T>*>& seen,
                std::vector<TensorNode<T>*>& order) {
  // iterative postorder; graphs can be deep on long training traces
  std::vector<std::pair<TensorNode<T>*, std::size_t>> stack{{n, 0}};
  seen.insert(n);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorNode<T>* p = node->parents[next++].node();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
}

}  // namespace detail

// Reverse-mode sweep from a scalar root. Gradients accumulate into every
// node with requires_grad reachable from the root.
template <class T>
void backward(const Tensor<T>& root) {
  require(root.numel() == 1, "backward: root must be scalar, got shape ", shape_str(root.shape()));
  require(root.requires_grad(), "backward: root does not require gradients");
  std::unordered_set<TensorNode<T>*> seen;
  std::vector<TensorNode<T>*> order;
  detail::topo_visit(root.node(), seen, order);
  for (auto* n : order) n->ensure_grad();
  root.node()->grad[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backprop) (*it)->backprop(**it);
}

}  // namespace mspd

#endif  // MSPD_TENSOR_HPP
