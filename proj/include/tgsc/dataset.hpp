#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgsc/series.hpp"
#include "tgsc/tensor.hpp"

namespace tgsc {

enum class Split { kTrain, kVal, kTest };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

// One compression unit: the normalized N x d window of all links.
struct Subsignal {
  std::uint32_t id = 0;            // dense, 0..count-1, window order
  std::uint32_t window_index = 0;  // index into the source series
  Split split = Split::kTrain;
  Tensor data;                     // N x d, normalized
};

struct TrafficDataset {
  std::uint32_t n_links = 0;
  std::uint32_t window = 0;  // d
  std::uint64_t seed = 0;
  double interval_seconds = 0.0;
  double norm_min = 0.0;  // global min/max over training windows only
  double norm_max = 0.0;
  std::vector<std::string> link_names;
  std::vector<Subsignal> subsignals;  // ascending id

  std::vector<std::uint32_t> split_ids(Split s) const {
    std::vector<std::uint32_t> ids;
    for (const auto& sub : subsignals) {
      if (sub.split == s) ids.push_back(sub.id);
    }
    return ids;
  }

  double denormalize(double v) const { return v * (norm_max - norm_min) + norm_min; }
  double normalize(double v) const {
    const double span = norm_max - norm_min;
    return span > 0.0 ? (v - norm_min) / span : 0.0;
  }
};

// Non-overlapping windowing: indices of the windows of length d that
// contain no missing value. The trailing remainder is dropped.
std::vector<std::uint32_t> cut_clean_windows(const LinkSeries& series, std::uint32_t d);

// Cuts the series into non-overlapping windows of length d, drops windows
// containing missing values, min-max normalizes with constants computed
// from training windows only, and assigns a seeded 60/20/20 split.
TrafficDataset window_and_split(const LinkSeries& series, std::uint32_t d, std::uint64_t seed);

// Dataset persistence: a versioned JSON manifest plus a raw little-endian
// float32 data file next to it (one N x d block per subsignal, id order).
void save_dataset(const TrafficDataset& dataset, const std::string& dir);
TrafficDataset load_dataset(const std::string& manifest_path);

}  // namespace tgsc
