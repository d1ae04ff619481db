#include "tgsc/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <limits>

#include <nlohmann/json.hpp>

#include "tgsc/errors.hpp"
#include "tgsc/io_util.hpp"
#include "tgsc/rng.hpp"

namespace tgsc {

using ordered_json = nlohmann::ordered_json;

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split name: " + name);
}

std::vector<std::uint32_t> cut_clean_windows(const LinkSeries& series, std::uint32_t d) {
  if (d < 1) throw ParameterError("window length must be >= 1");
  if (series.n_intervals < d) {
    throw ParameterError("series has " + std::to_string(series.n_intervals) +
                         " intervals, need at least " + std::to_string(d));
  }
  const std::size_t window_count = series.n_intervals / d;  // trailing remainder dropped
  std::vector<std::uint32_t> clean;
  for (std::uint32_t w = 0; w < window_count; ++w) {
    bool has_missing = false;
    for (std::size_t l = 0; l < series.n_links && !has_missing; ++l) {
      for (std::uint32_t t = 0; t < d; ++t) {
        if (series.is_missing(l, w * d + t)) {
          has_missing = true;
          break;
        }
      }
    }
    if (!has_missing) clean.push_back(w);
  }
  return clean;
}

TrafficDataset window_and_split(const LinkSeries& series, std::uint32_t d, std::uint64_t seed) {
  const std::vector<std::uint32_t> clean = cut_clean_windows(series, d);
  if (clean.size() < 5) {
    throw ValidationError("only " + std::to_string(clean.size()) +
                          " clean windows; need at least 5 for a 60/20/20 split");
  }

  // Seeded assignment: shuffle clean window positions, carve off test and
  // val tails of floor(0.2 n) each, the rest trains.
  const std::size_t n = clean.size();
  std::vector<std::uint32_t> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = static_cast<std::uint32_t>(i);
  Rng rng(seed);
  rng.shuffle(positions);
  const std::size_t n_test = n / 5;
  const std::size_t n_val = n / 5;
  std::vector<Split> assignment(n, Split::kTrain);
  for (std::size_t i = 0; i < n_test; ++i) assignment[positions[i]] = Split::kTest;
  for (std::size_t i = n_test; i < n_test + n_val; ++i) assignment[positions[i]] = Split::kVal;

  // Normalization constants from training windows only.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment[i] != Split::kTrain) continue;
    const std::uint32_t w = clean[i];
    for (std::size_t l = 0; l < series.n_links; ++l) {
      for (std::uint32_t t = 0; t < d; ++t) {
        const double v = series.at(l, w * d + t);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }

  TrafficDataset ds;
  ds.n_links = static_cast<std::uint32_t>(series.n_links);
  ds.window = d;
  ds.seed = seed;
  ds.interval_seconds = series.interval_seconds;
  ds.norm_min = lo;
  ds.norm_max = hi;
  ds.link_names = series.link_names;
  ds.subsignals.reserve(n);
  const double span = hi - lo;
  for (std::size_t i = 0; i < n; ++i) {
    Subsignal sub;
    sub.id = static_cast<std::uint32_t>(i);
    sub.window_index = clean[i];
    sub.split = assignment[i];
    sub.data = Tensor::zeros({series.n_links, d});
    for (std::size_t l = 0; l < series.n_links; ++l) {
      for (std::uint32_t t = 0; t < d; ++t) {
        const double v = series.at(l, clean[i] * d + t);
        sub.data.at(l, t) = static_cast<float>(span > 0.0 ? (v - lo) / span : 0.0);
      }
    }
    ds.subsignals.push_back(std::move(sub));
  }
  return ds;
}

void save_dataset(const TrafficDataset& dataset, const std::string& dir) {
  std::filesystem::create_directories(dir);

  std::string blob;
  blob.reserve(dataset.subsignals.size() * dataset.n_links * dataset.window * 4);
  for (const auto& sub : dataset.subsignals) {
    for (float v : sub.data.values) append_raw(blob, v);
  }
  write_file_atomic(dir + "/subsignals.f32", blob);

  ordered_json manifest;
  manifest["format"] = "tgsc-dataset";
  manifest["version"] = 1;
  manifest["seed"] = dataset.seed;
  manifest["window"] = dataset.window;
  manifest["n_links"] = dataset.n_links;
  manifest["interval_seconds"] = dataset.interval_seconds;
  manifest["normalization"] = {{"min", dataset.norm_min}, {"max", dataset.norm_max}};
  manifest["link_names"] = dataset.link_names;
  manifest["data_file"] = "subsignals.f32";
  ordered_json subs = ordered_json::array();
  for (const auto& sub : dataset.subsignals) {
    subs.push_back({{"id", sub.id}, {"window", sub.window_index}, {"split", split_name(sub.split)}});
  }
  manifest["subsignals"] = std::move(subs);
  write_file_atomic(dir + "/manifest.json", manifest.dump(2) + "\n");
}

TrafficDataset load_dataset(const std::string& manifest_path) {
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path + ": " + e.what());
  }
  if (manifest.value("format", "") != "tgsc-dataset") {
    throw FormatError(manifest_path + ": not a tgsc-dataset manifest");
  }
  if (manifest.value("version", 0) != 1) {
    throw FormatError(manifest_path + ": unsupported manifest version");
  }

  TrafficDataset ds;
  ds.seed = manifest.at("seed").get<std::uint64_t>();
  ds.window = manifest.at("window").get<std::uint32_t>();
  ds.n_links = manifest.at("n_links").get<std::uint32_t>();
  ds.interval_seconds = manifest.at("interval_seconds").get<double>();
  ds.norm_min = manifest.at("normalization").at("min").get<double>();
  ds.norm_max = manifest.at("normalization").at("max").get<double>();
  ds.link_names = manifest.at("link_names").get<std::vector<std::string>>();
  if (ds.link_names.size() != ds.n_links) {
    throw FormatError(manifest_path + ": link name count does not match n_links");
  }

  const std::string data_path =
      (std::filesystem::path(manifest_path).parent_path() / manifest.at("data_file").get<std::string>())
          .string();
  const std::string blob = read_file(data_path);
  const std::size_t per_sub = static_cast<std::size_t>(ds.n_links) * ds.window;
  const auto& subs = manifest.at("subsignals");
  if (blob.size() != subs.size() * per_sub * sizeof(float)) {
    throw FormatError(data_path + ": size does not match manifest subsignal count");
  }

  std::size_t offset = 0;
  for (const auto& entry : subs) {
    Subsignal sub;
    sub.id = entry.at("id").get<std::uint32_t>();
    sub.window_index = entry.at("window").get<std::uint32_t>();
    sub.split = split_from_name(entry.at("split").get<std::string>());
    sub.data = Tensor::zeros({ds.n_links, ds.window});
    std::memcpy(sub.data.values.data(), blob.data() + offset, per_sub * sizeof(float));
    offset += per_sub * sizeof(float);
    ds.subsignals.push_back(std::move(sub));
  }
  return ds;
}

}  // namespace tgsc
