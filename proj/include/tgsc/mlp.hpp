#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tgsc/autodiff.hpp"
#include "tgsc/param_store.hpp"
#include "tgsc/rng.hpp"

namespace tgsc {

enum class Activation { kRelu, kIdentity };

// widths = [in, h1, ..., out]; activation applies to hidden layers, the
// final layer is always linear so outputs span all reals.
struct MlpSpec {
  std::vector<std::size_t> widths;
  Activation activation = Activation::kRelu;

  std::size_t layer_count() const { return widths.empty() ? 0 : widths.size() - 1; }
  std::size_t input_width() const { return widths.front(); }
  std::size_t output_width() const { return widths.back(); }

  void validate() const {
    if (widths.size() < 2) throw ParameterError("MlpSpec needs at least one layer");
    for (std::size_t w : widths) {
      if (w == 0) throw ParameterError("MlpSpec widths must be positive");
    }
  }

  // Weights + biases.
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) n += widths[i] * widths[i + 1] + widths[i + 1];
    return n;
  }
};

inline std::string weight_name(const std::string& role, std::size_t layer) {
  return role + "/W" + std::to_string(layer);
}
inline std::string bias_name(const std::string& role, std::size_t layer) {
  return role + "/b" + std::to_string(layer);
}

// Glorot-uniform weights, zero biases.
template <typename T>
void init_mlp_params(ParamStoreT<T>& store, const std::string& role, const MlpSpec& spec,
                     Rng& rng) {
  spec.validate();
  for (std::size_t i = 0; i + 1 < spec.widths.size(); ++i) {
    const std::size_t fan_in = spec.widths[i], fan_out = spec.widths[i + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    TensorT<T> w = TensorT<T>::zeros({fan_in, fan_out});
    for (auto& v : w.values) v = static_cast<T>(rng.uniform(-bound, bound));
    store.add(weight_name(role, i), std::move(w));
    store.add(bias_name(role, i), TensorT<T>::zeros({1, fan_out}));
  }
}

template <typename T>
Var<T> mlp_forward(const ParamStoreT<T>& store, const std::string& role, const MlpSpec& spec,
                   Var<T> x) {
  spec.validate();
  if (x.cols() != spec.input_width()) {
    throw DimensionError("mlp '" + role + "' layer 0 expects input width " +
                         std::to_string(spec.input_width()) + ", got " + std::to_string(x.cols()));
  }
  for (std::size_t i = 0; i + 1 < spec.widths.size(); ++i) {
    const auto& w = store.at(weight_name(role, i));
    const auto& b = store.at(bias_name(role, i));
    if (w.rows() != x.cols()) {
      throw DimensionError("mlp '" + role + "' layer " + std::to_string(i) + " weight rows " +
                           std::to_string(w.rows()) + " do not match activation width " +
                           std::to_string(x.cols()));
    }
    x = add_rowvec(matmul(x, w), b);
    const bool hidden = i + 2 < spec.widths.size();
    if (hidden && spec.activation == Activation::kRelu) x = relu(x);
  }
  return x;
}

}  // namespace tgsc
