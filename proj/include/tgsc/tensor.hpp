#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "tgsc/errors.hpp"

namespace tgsc {

// Dense row-major tensor of a fixed scalar type. The whole engine is
// templated on T: pipelines run in float, gradient checks instantiate
// double ("high-precision mode").
template <typename T>
struct TensorT {
  std::vector<std::size_t> shape;
  std::vector<T> values;
  bool requires_grad = false;

  TensorT() = default;

  TensorT(std::vector<std::size_t> s, std::vector<T> v)
      : shape(std::move(s)), values(std::move(v)) {
    if (values.size() != element_count(shape)) {
      throw DimensionError("tensor value count " + std::to_string(values.size()) +
                           " does not match shape product " +
                           std::to_string(element_count(shape)));
    }
  }

  static TensorT zeros(std::vector<std::size_t> s) {
    const std::size_t n = element_count(s);
    return TensorT(std::move(s), std::vector<T>(n, T(0)));
  }

  static TensorT row(std::vector<T> v) {
    const std::size_t n = v.size();
    return TensorT({1, n}, std::move(v));
  }

  static TensorT scalar(T v) { return TensorT({1}, {v}); }

  static std::size_t element_count(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
  }

  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? (shape.empty() ? 0 : 1) : shape[1]; }

  T& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  const T& at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }
};

template <typename T>
std::string shape_string(const TensorT<T>& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(t.shape[i]);
  }
  return s + "]";
}

using Tensor = TensorT<float>;

}  // namespace tgsc
