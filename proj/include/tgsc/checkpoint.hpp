#pragma once

#include <cstdint>
#include <string>

#include "tgsc/models.hpp"
#include "tgsc/param_store.hpp"

namespace tgsc {

// Self-describing trained model: magic "TGSC-MODEL", u16 version, a JSON
// hyperparameter header sufficient to rebuild every MlpSpec, named float32
// tensors in store order, and a trailing content digest that doubles as
// the model id referenced by compressed artifacts.
struct Checkpoint {
  TrainConfig config;
  std::uint32_t n_links = 0;
  std::uint32_t window = 0;
  ParamStore params;
  std::uint64_t model_id = 0;  // filled on save/load
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes, const std::string& context);

// Returns the content digest (model id) of the written file.
std::uint64_t save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tgsc
