#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tgsc/autodiff.hpp"
#include "tgsc/mlp.hpp"
#include "tgsc/param_store.hpp"
#include "tgsc/rng.hpp"

namespace tgsc::testing {

// Central finite differences over every scalar of every parameter in the
// store. `loss_fn` must rebuild the forward pass from the store's current
// values on each call.
template <typename T>
GradMap<T> finite_difference_grads(ParamStoreT<T>& store,
                                   const std::function<T()>& loss_fn, T step) {
  GradMap<T> out;
  for (const auto& [name, var] : store) {
    auto& values = store.mutable_values(name);
    TensorT<T> g = TensorT<T>::zeros(var.tensor().shape);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const T orig = values[i];
      values[i] = orig + step;
      const T up = loss_fn();
      values[i] = orig - step;
      const T down = loss_fn();
      values[i] = orig;
      g.values[i] = (up - down) / (T(2) * step);
    }
    out.emplace(name, std::move(g));
  }
  return out;
}

// ||a - b||_2 / max(||b||_2, floor)
template <typename T>
double relative_grad_error(const TensorT<T>& a, const TensorT<T>& b) {
  double diff = 0, ref = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = static_cast<double>(a.values[i]) - static_cast<double>(b.values[i]);
    diff += d * d;
    ref += static_cast<double>(b.values[i]) * static_cast<double>(b.values[i]);
  }
  return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-12);
}

template <typename T>
TensorT<T> random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = -1.0,
                         double hi = 1.0) {
  TensorT<T> t = TensorT<T>::zeros(std::move(shape));
  for (auto& v : t.values) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

}  // namespace tgsc::testing

namespace tgsc::oracle {

// Straight-line forward pass on raw vectors, independent of the graph
// machinery.
template <typename T>
std::vector<T> plain_mlp_forward(const ParamStoreT<T>& store, const std::string& role,
                                 const MlpSpec& spec, std::vector<T> x) {
  for (std::size_t layer = 0; layer + 1 < spec.widths.size(); ++layer) {
    const auto& w = store.at(weight_name(role, layer)).tensor();
    const auto& b = store.at(bias_name(role, layer)).tensor();
    std::vector<T> y(w.cols(), T(0));
    for (std::size_t j = 0; j < w.cols(); ++j) {
      T acc = b.values[j];
      for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * w.at(i, j);
      y[j] = acc;
    }
    if (layer + 2 < spec.widths.size() && spec.activation == Activation::kRelu) {
      for (auto& v : y) v = v > T(0) ? v : T(0);
    }
    x = std::move(y);
  }
  return x;
}

// Mean/max/min concatenation computed the obvious way (plain left-to-right
// mean), independent of the engine's order-canonicalized version.
template <typename T>
std::vector<T> plain_aggregate(const std::vector<std::vector<T>>& members, std::size_t width) {
  std::vector<T> out(3 * width, T(0));
  if (members.empty()) return out;
  for (std::size_t j = 0; j < width; ++j) {
    T sum = 0, mx = members[0][j], mn = members[0][j];
    for (const auto& m : members) {
      sum += m[j];
      mx = std::max(mx, m[j]);
      mn = std::min(mn, m[j]);
    }
    out[j] = sum / static_cast<T>(members.size());
    out[width + j] = mx;
    out[2 * width + j] = mn;
  }
  return out;
}

template <typename T>
std::vector<T> concat(const std::vector<std::vector<T>>& parts) {
  std::vector<T> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace tgsc::oracle
