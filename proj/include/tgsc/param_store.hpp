#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tgsc/autodiff.hpp"
#include "tgsc/errors.hpp"
#include "tgsc/tensor.hpp"

namespace tgsc {

// Named collection of learnable tensors. Ordered by name so iteration,
// optimizer updates and serialization are deterministic.
template <typename T>
class ParamStoreT {
 public:
  using Map = std::map<std::string, Var<T>>;

  Var<T>& add(const std::string& name, TensorT<T> init) {
    auto [it, inserted] = params_.emplace(name, Var<T>::parameter(std::move(init), name));
    if (!inserted) throw ParameterError("duplicate parameter name: " + name);
    return it->second;
  }

  const Var<T>& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ParameterError("unknown parameter: " + name);
    return it->second;
  }

  bool contains(const std::string& name) const { return params_.count(name) != 0; }

  std::size_t size() const { return params_.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, var] : params_) n += var.tensor().size();
    return n;
  }

  typename Map::const_iterator begin() const { return params_.begin(); }
  typename Map::const_iterator end() const { return params_.end(); }

  // Raw value snapshot/restore, used for best-validation-epoch checkpointing.
  std::map<std::string, std::vector<T>> snapshot() const {
    std::map<std::string, std::vector<T>> s;
    for (const auto& [name, var] : params_) s.emplace(name, var.values());
    return s;
  }

  void restore(const std::map<std::string, std::vector<T>>& snap) {
    for (const auto& [name, values] : snap) {
      auto it = params_.find(name);
      if (it == params_.end()) throw ParameterError("snapshot has unknown parameter: " + name);
      auto node = it->second.node();
      if (node->data.values.size() != values.size()) {
        throw DimensionError("snapshot size mismatch for parameter: " + name);
      }
      node->data.values = values;
    }
  }

  // In-place value mutation for the optimizer.
  std::vector<T>& mutable_values(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ParameterError("unknown parameter: " + name);
    return it->second.node()->data.values;
  }

 private:
  Map params_;
};

using ParamStore = ParamStoreT<float>;

}  // namespace tgsc
