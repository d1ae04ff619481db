#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tgsc/autodiff.hpp"
#include "tgsc/param_store.hpp"

namespace tgsc {

// Adam with bias correction. Moments are allocated lazily per parameter;
// parameters missing from the gradient map are left untouched (their
// moments keep their previous values).
template <typename T>
struct AdamStateT {
  T learning_rate;
  T epsilon;
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  std::int64_t step = 0;
  std::map<std::string, std::vector<T>> first_moment;
  std::map<std::string, std::vector<T>> second_moment;

  AdamStateT(T lr, T eps) : learning_rate(lr), epsilon(eps) {}
};

template <typename T>
void adam_step(ParamStoreT<T>& params, const GradMap<T>& grads, AdamStateT<T>& state) {
  state.step += 1;
  const T b1 = state.beta1, b2 = state.beta2;
  const T bc1 = T(1) - static_cast<T>(std::pow(static_cast<double>(b1), static_cast<double>(state.step)));
  const T bc2 = T(1) - static_cast<T>(std::pow(static_cast<double>(b2), static_cast<double>(state.step)));
  for (const auto& [name, grad] : grads) {
    auto& values = params.mutable_values(name);
    if (grad.values.size() != values.size()) {
      throw DimensionError("gradient size mismatch for parameter: " + name);
    }
    auto& m = state.first_moment[name];
    auto& v = state.second_moment[name];
    if (m.empty()) m.assign(values.size(), T(0));
    if (v.empty()) v.assign(values.size(), T(0));
    for (std::size_t i = 0; i < values.size(); ++i) {
      const T g = grad.values[i];
      m[i] = b1 * m[i] + (T(1) - b1) * g;
      v[i] = b2 * v[i] + (T(1) - b2) * g * g;
      const T mhat = m[i] / bc1;
      const T vhat = v[i] / bc2;
      values[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

using AdamState = AdamStateT<float>;

}  // namespace tgsc
