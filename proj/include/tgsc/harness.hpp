#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgsc/dataset.hpp"
#include "tgsc/models.hpp"
#include "tgsc/param_store.hpp"

namespace tgsc {

struct EpochRecord {
  std::uint32_t epoch = 0;  // 1-based
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  ParamStore params;  // best validation epoch
  std::vector<EpochRecord> history;
  std::uint32_t best_epoch = 0;  // 1-based index into history
  bool diverged = false;
};

// Adam over seeded mini-batches; per-epoch validation MSE; the returned
// parameters are the best validation epoch's. Aborts on a non-finite loss
// with the last finite epoch reported. Single-threaded and bitwise
// reproducible for a fixed (config, dataset, seed).
TrainResult train(const TrainConfig& config, const TrafficDataset& dataset);

struct EvalReport {
  std::string split;
  double mse = 0.0;
  double mae = 0.0;
  std::vector<double> per_subsignal_mse;  // split id order
  std::vector<double> per_subsignal_mae;
  bool has_rc = false;
  Ratio achieved_rc{0, 1};
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

EvalReport evaluate(const ParamStore& params, const TrainConfig& config,
                    const TrafficDataset& dataset, Split split);

// Same metrics over externally produced reconstructions: a headerless CSV
// in normalized signal space, N rows of d values per subsignal, subsignals
// in ascending-id order within the split.
EvalReport compare_external(const std::string& csv_path, const TrafficDataset& dataset,
                            Split split);

// Normalized reconstructions for a whole split in the same layout the
// external comparison expects; the self-comparison fixed point.
void dump_reconstructions(const ParamStore& params, const TrainConfig& config,
                          const TrafficDataset& dataset, Split split, const std::string& path);

// Structured-text emission: history as JSON lines (one record per epoch),
// report as a single JSON document.
void save_history(const std::vector<EpochRecord>& history, const std::string& path);
void save_eval_report(const EvalReport& report, const std::string& path);

}  // namespace tgsc
