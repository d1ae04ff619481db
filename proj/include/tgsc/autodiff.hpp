#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tgsc/errors.hpp"
#include "tgsc/tensor.hpp"

namespace tgsc {

// Reverse-mode engine. Every operation allocates a graph node holding the
// result tensor plus a closure that routes the node's gradient into its
// parents. Recording happens only while gradients are enabled and some
// operand requires them; inference paths pay for the forward values only.

namespace detail {
inline bool& grad_enabled_flag() {
  thread_local bool enabled = true;
  return enabled;
}
}  // namespace detail

// RAII guard disabling graph recording on the current thread.
class NoGradGuard {
 public:
  NoGradGuard() : prev_(detail::grad_enabled_flag()) { detail::grad_enabled_flag() = false; }
  ~NoGradGuard() { detail::grad_enabled_flag() = prev_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

inline bool grad_enabled() { return detail::grad_enabled_flag(); }

template <typename T>
struct VarNode {
  TensorT<T> data;
  std::vector<T> grad;  // sized lazily by backward()
  std::vector<std::shared_ptr<VarNode>> parents;
  std::function<void(VarNode&)> backprop;
  std::string param_name;  // nonempty iff this node is a named parameter leaf
};

// Value handle over a shared graph node.
template <typename T>
class Var {
 public:
  Var() = default;

  static Var constant(TensorT<T> t) {
    auto n = std::make_shared<VarNode<T>>();
    t.requires_grad = false;
    n->data = std::move(t);
    return Var(std::move(n));
  }

  static Var parameter(TensorT<T> t, std::string name) {
    auto n = std::make_shared<VarNode<T>>();
    t.requires_grad = true;
    n->data = std::move(t);
    n->param_name = std::move(name);
    return Var(std::move(n));
  }

  bool valid() const { return node_ != nullptr; }
  const TensorT<T>& tensor() const { return node_->data; }
  const std::vector<T>& values() const { return node_->data.values; }
  const std::vector<std::size_t>& shape() const { return node_->data.shape; }
  std::size_t rows() const { return node_->data.rows(); }
  std::size_t cols() const { return node_->data.cols(); }
  bool requires_grad() const { return node_->data.requires_grad; }
  T item() const {
    if (node_->data.size() != 1) {
      throw DimensionError("item() on non-scalar tensor " + shape_string(node_->data));
    }
    return node_->data.values[0];
  }

  std::shared_ptr<VarNode<T>> node() const { return node_; }

 private:
  explicit Var(std::shared_ptr<VarNode<T>> n) : node_(std::move(n)) {}

  template <typename U>
  friend Var<U> make_op(TensorT<U> result, std::vector<Var<U>> parents,
                        std::function<void(VarNode<U>&)> backprop);

  std::shared_ptr<VarNode<T>> node_;
};

template <typename T>
Var<T> make_op(TensorT<T> result, std::vector<Var<T>> parents,
               std::function<void(VarNode<T>&)> backprop) {
  auto n = std::make_shared<VarNode<T>>();
  bool record = grad_enabled();
  if (record) {
    record = false;
    for (const auto& p : parents) {
      if (p.requires_grad()) {
        record = true;
        break;
      }
    }
  }
  result.requires_grad = record;
  n->data = std::move(result);
  if (record) {
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backprop = std::move(backprop);
  }
  return Var<T>(std::move(n));
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  const auto& A = a.tensor();
  const auto& B = b.tensor();
  if (A.shape.size() != 2 || B.shape.size() != 2 || A.cols() != B.rows()) {
    throw DimensionError("matmul shape mismatch " + shape_string(A) + " x " + shape_string(B));
  }
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  TensorT<T> out = TensorT<T>::zeros({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = &A.values[i * k];
    T* orow = &out.values[i * n];
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T av = arow[kk];
      if (av == T(0)) continue;
      const T* brow = &B.values[kk * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  return make_op<T>(std::move(out), {a, b}, [m, k, n](VarNode<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const std::vector<T>& g = self.grad;
    if (pa.data.requires_grad) {
      for (std::size_t i = 0; i < m; ++i) {
        T* da = &pa.grad[i * k];
        const T* grow = &g[i * n];
        for (std::size_t kk = 0; kk < k; ++kk) {
          const T* brow = &pb.data.values[kk * n];
          T acc = 0;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          da[kk] += acc;
        }
      }
    }
    if (pb.data.requires_grad) {
      for (std::size_t i = 0; i < m; ++i) {
        const T* arow = &pa.data.values[i * k];
        const T* grow = &g[i * n];
        for (std::size_t kk = 0; kk < k; ++kk) {
          const T av = arow[kk];
          if (av == T(0)) continue;
          T* db = &pb.grad[kk * n];
          for (std::size_t j = 0; j < n; ++j) db[j] += av * grow[j];
        }
      }
    }
  });
}

// x: [m,n], bias: [1,n] broadcast over rows.
template <typename T>
Var<T> add_rowvec(const Var<T>& x, const Var<T>& bias) {
  const auto& X = x.tensor();
  const auto& B = bias.tensor();
  if (B.rows() != 1 || B.cols() != X.cols()) {
    throw DimensionError("add_rowvec shape mismatch " + shape_string(X) + " + " + shape_string(B));
  }
  const std::size_t m = X.rows(), n = X.cols();
  TensorT<T> out = X;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.values[i * n + j] += B.values[j];
  return make_op<T>(std::move(out), {x, bias}, [m, n](VarNode<T>& self) {
    auto& px = *self.parents[0];
    auto& pb = *self.parents[1];
    if (px.data.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) px.grad[i] += self.grad[i];
    }
    if (pb.data.requires_grad) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) pb.grad[j] += self.grad[i * n + j];
    }
  });
}

namespace detail {
template <typename T, typename Fwd, typename Bwd>
Var<T> elementwise_binary(const Var<T>& a, const Var<T>& b, const char* opname, Fwd fwd, Bwd bwd) {
  const auto& A = a.tensor();
  const auto& B = b.tensor();
  if (!A.same_shape(B)) {
    throw DimensionError(std::string(opname) + " shape mismatch " + shape_string(A) + " vs " +
                         shape_string(B));
  }
  TensorT<T> out = A;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = fwd(A.values[i], B.values[i]);
  return make_op<T>(std::move(out), {a, b}, std::move(bwd));
}
}  // namespace detail

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  return detail::elementwise_binary(
      a, b, "add", [](T x, T y) { return x + y; },
      [](VarNode<T>& self) {
        for (int p = 0; p < 2; ++p) {
          auto& par = *self.parents[p];
          if (!par.data.requires_grad) continue;
          for (std::size_t i = 0; i < self.grad.size(); ++i) par.grad[i] += self.grad[i];
        }
      });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  return detail::elementwise_binary(
      a, b, "sub", [](T x, T y) { return x - y; },
      [](VarNode<T>& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          if (pa.data.requires_grad) pa.grad[i] += self.grad[i];
          if (pb.data.requires_grad) pb.grad[i] -= self.grad[i];
        }
      });
}

// Hadamard product.
template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  return detail::elementwise_binary(
      a, b, "mul", [](T x, T y) { return x * y; },
      [](VarNode<T>& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          if (pa.data.requires_grad) pa.grad[i] += self.grad[i] * pb.data.values[i];
          if (pb.data.requires_grad) pb.grad[i] += self.grad[i] * pa.data.values[i];
        }
      });
}

template <typename T>
Var<T> scale(const Var<T>& x, T c) {
  TensorT<T> out = x.tensor();
  for (auto& v : out.values) v *= c;
  return make_op<T>(std::move(out), {x}, [c](VarNode<T>& self) {
    auto& p = *self.parents[0];
    if (!p.data.requires_grad) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += c * self.grad[i];
  });
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  TensorT<T> out = x.tensor();
  for (auto& v : out.values) v = v > T(0) ? v : T(0);
  return make_op<T>(std::move(out), {x}, [](VarNode<T>& self) {
    auto& p = *self.parents[0];
    if (!p.data.requires_grad) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (p.data.values[i] > T(0)) p.grad[i] += self.grad[i];
    }
  });
}

template <typename T>
Var<T> sum_all(const Var<T>& x) {
  T acc = 0;
  for (T v : x.values()) acc += v;
  return make_op<T>(TensorT<T>::scalar(acc), {x}, [](VarNode<T>& self) {
    auto& p = *self.parents[0];
    if (!p.data.requires_grad) return;
    const T g = self.grad[0];
    for (auto& pg : p.grad) pg += g;
  });
}

// Concatenate row vectors [1,w_i] into [1, sum w_i].
template <typename T>
Var<T> concat_row(const std::vector<Var<T>>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.rows() != 1) {
      throw DimensionError("concat_row expects row vectors, got " + shape_string(p.tensor()));
    }
    total += p.cols();
  }
  TensorT<T> out = TensorT<T>::zeros({1, total});
  std::size_t off = 0;
  std::vector<std::size_t> offsets(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    offsets[i] = off;
    const auto& v = parts[i].values();
    std::copy(v.begin(), v.end(), out.values.begin() + off);
    off += v.size();
  }
  return make_op<T>(std::move(out), parts, [offsets](VarNode<T>& self) {
    for (std::size_t i = 0; i < self.parents.size(); ++i) {
      auto& p = *self.parents[i];
      if (!p.data.requires_grad) continue;
      const std::size_t w = p.data.size();
      for (std::size_t j = 0; j < w; ++j) p.grad[j] += self.grad[offsets[i] + j];
    }
  });
}

// Permutation-invariant set aggregation: concatenation of element-wise
// mean, max and min over the member rows, [1,w] each -> [1,3w]. The mean
// sums values in ascending numeric order so the result is bitwise
// independent of member enumeration order. An empty member list yields
// the zero vector.
template <typename T>
Var<T> aggregate_mmm(const std::vector<Var<T>>& members, std::size_t width) {
  if (members.empty()) {
    return Var<T>::constant(TensorT<T>::zeros({1, 3 * width}));
  }
  for (const auto& m : members) {
    if (m.rows() != 1 || m.cols() != width) {
      throw DimensionError("aggregate_mmm expects [1," + std::to_string(width) + "] members, got " +
                           shape_string(m.tensor()));
    }
  }
  const std::size_t n = members.size();
  TensorT<T> out = TensorT<T>::zeros({1, 3 * width});
  std::vector<std::uint32_t> argmax(width), argmin(width);
  std::vector<T> column(n);
  for (std::size_t j = 0; j < width; ++j) {
    T mx = members[0].values()[j], mn = mx;
    std::uint32_t ax = 0, an = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const T v = members[i].values()[j];
      column[i] = v;
      if (v > mx) { mx = v; ax = static_cast<std::uint32_t>(i); }
      if (v < mn) { mn = v; an = static_cast<std::uint32_t>(i); }
    }
    std::sort(column.begin(), column.end());
    T acc = 0;
    for (T v : column) acc += v;
    out.values[j] = acc / static_cast<T>(n);
    out.values[width + j] = mx;
    out.values[2 * width + j] = mn;
    argmax[j] = ax;
    argmin[j] = an;
  }
  return make_op<T>(std::move(out), members,
                    [width, n, argmax = std::move(argmax), argmin = std::move(argmin)](VarNode<T>& self) {
                      const T inv = T(1) / static_cast<T>(n);
                      for (std::size_t j = 0; j < width; ++j) {
                        const T gmean = self.grad[j] * inv;
                        for (auto& par : self.parents) {
                          if (par->data.requires_grad) par->grad[j] += gmean;
                        }
                        auto& pmax = *self.parents[argmax[j]];
                        if (pmax.data.requires_grad) pmax.grad[j] += self.grad[width + j];
                        auto& pmin = *self.parents[argmin[j]];
                        if (pmin.data.requires_grad) pmin.grad[j] += self.grad[2 * width + j];
                      }
                    });
}

// Mean squared error between same-shaped tensors, as a scalar.
template <typename T>
Var<T> mse(const Var<T>& pred, const Var<T>& target) {
  auto d = sub(pred, target);
  auto sq = mul(d, d);
  return scale(sum_all(sq), T(1) / static_cast<T>(pred.tensor().size()));
}

// ---------------------------------------------------------------------------
// Backward pass
// ---------------------------------------------------------------------------

template <typename T>
using GradMap = std::map<std::string, TensorT<T>>;

// Runs reverse-mode accumulation from a scalar loss and returns the
// gradient of every named parameter reachable from it. Parameters the loss
// does not depend on are absent from the map.
template <typename T>
GradMap<T> backward(const Var<T>& loss) {
  if (!loss.valid() || loss.tensor().size() != 1) {
    throw DimensionError("backward requires a scalar loss");
  }
  // Iterative post-order DFS; parents precede children in `order`.
  std::vector<VarNode<T>*> order;
  std::unordered_set<VarNode<T>*> visited;
  std::vector<std::pair<VarNode<T>*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      VarNode<T>* parent = node->parents[next++].get();
      if (visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (VarNode<T>* n : order) n->grad.assign(n->data.size(), T(0));
  loss.node()->grad[0] = T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VarNode<T>* n = *it;
    if (n->backprop) n->backprop(*n);
  }
  GradMap<T> grads;
  for (VarNode<T>* n : order) {
    if (n->param_name.empty() || !n->data.requires_grad) continue;
    auto [it, inserted] = grads.emplace(n->param_name, TensorT<T>(n->data.shape, n->grad));
    if (!inserted) {
      for (std::size_t i = 0; i < n->grad.size(); ++i) it->second.values[i] += n->grad[i];
    }
  }
  return grads;
}

}  // namespace tgsc
