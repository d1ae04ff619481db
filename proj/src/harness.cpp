#include "tgsc/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tgsc/adam.hpp"
#include "tgsc/io_util.hpp"

namespace tgsc {

using ordered_json = nlohmann::ordered_json;

namespace {

double subsignal_mse(const Tensor& recon, const Tensor& target) {
  double acc = 0;
  for (std::size_t i = 0; i < target.values.size(); ++i) {
    const double d = static_cast<double>(recon.values[i]) - static_cast<double>(target.values[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(target.values.size());
}

double subsignal_mae(const Tensor& recon, const Tensor& target) {
  double acc = 0;
  for (std::size_t i = 0; i < target.values.size(); ++i) {
    acc += std::abs(static_cast<double>(recon.values[i]) -
                    static_cast<double>(target.values[i]));
  }
  return acc / static_cast<double>(target.values.size());
}

double validation_mse(const ParamStore& params, const TrainConfig& cfg,
                      const TrafficDataset& dataset, const std::vector<std::uint32_t>& ids,
                      const ModelContext& ctx) {
  NoGradGuard guard;
  double acc = 0;
  for (const std::uint32_t id : ids) {
    const auto& sub = dataset.subsignals[id];
    acc += subsignal_mse(model_reconstruct(params, cfg, sub.data, ctx), sub.data);
  }
  return acc / static_cast<double>(ids.size());
}

}  // namespace

TrainResult train(const TrainConfig& config, const TrafficDataset& dataset) {
  config.validate(dataset.n_links, dataset.window);
  const auto train_ids = dataset.split_ids(Split::kTrain);
  const auto val_ids = dataset.split_ids(Split::kVal);
  if (train_ids.empty() || val_ids.empty()) {
    throw ValidationError("training requires nonempty train and val splits");
  }

  const ModelContext ctx = make_model_context(config, dataset.link_names);
  Rng rng(config.seed);
  ParamStore params = build_model_params<float>(config, dataset.n_links, dataset.window, rng);
  AdamState opt(static_cast<float>(config.learning_rate), static_cast<float>(config.epsilon));

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  std::map<std::string, std::vector<float>> best_snapshot = params.snapshot();
  result.best_epoch = 0;

  std::vector<std::uint32_t> order = train_ids;
  for (std::uint32_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Var<float> batch_loss;
      for (std::size_t i = start; i < stop; ++i) {
        auto fwd = model_forward(params, config, dataset.subsignals[order[i]].data, ctx);
        batch_loss = batch_loss.valid() ? add(batch_loss, fwd.loss) : fwd.loss;
      }
      const auto count = static_cast<float>(stop - start);
      batch_loss = scale(batch_loss, 1.0f / count);
      loss_sum += static_cast<double>(batch_loss.item()) * count;
      auto grads = backward(batch_loss);
      adam_step(params, grads, opt);
    }
    const double train_mse = loss_sum / static_cast<double>(order.size());
    const double val_mse = validation_mse(params, config, dataset, val_ids, ctx);
    if (!std::isfinite(train_mse) || !std::isfinite(val_mse)) {
      result.diverged = true;  // history keeps the last finite epoch
      break;
    }
    result.history.push_back({epoch, train_mse, val_mse});
    if (val_mse < best_val) {
      best_val = val_mse;
      best_snapshot = params.snapshot();
      result.best_epoch = epoch;
    }
  }

  params.restore(best_snapshot);
  result.params = std::move(params);
  return result;
}

EvalReport evaluate(const ParamStore& params, const TrainConfig& config,
                    const TrafficDataset& dataset, Split split) {
  config.validate(dataset.n_links, dataset.window);
  const auto ids = dataset.split_ids(split);
  if (ids.empty()) throw ValidationError("split is empty");
  const ModelContext ctx = make_model_context(config, dataset.link_names);

  const auto start = std::chrono::steady_clock::now();
  EvalReport report;
  report.split = split_name(split);
  report.seed = config.seed;
  NoGradGuard guard;
  for (const std::uint32_t id : ids) {
    const auto& sub = dataset.subsignals[id];
    const Tensor recon = model_reconstruct(params, config, sub.data, ctx);
    report.per_subsignal_mse.push_back(subsignal_mse(recon, sub.data));
    report.per_subsignal_mae.push_back(subsignal_mae(recon, sub.data));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    report.mse += report.per_subsignal_mse[i];
    report.mae += report.per_subsignal_mae[i];
  }
  report.mse /= static_cast<double>(ids.size());
  report.mae /= static_cast<double>(ids.size());
  report.has_rc = true;
  report.achieved_rc = config.achieved_rc(dataset.n_links, dataset.window);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

EvalReport compare_external(const std::string& csv_path, const TrafficDataset& dataset,
                            Split split) {
  const auto ids = dataset.split_ids(split);
  if (ids.empty()) throw ValidationError("split is empty");
  const std::size_t n = dataset.n_links, d = dataset.window;

  std::ifstream in(csv_path);
  if (!in) throw ParseError("cannot open: " + csv_path);
  std::vector<float> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t start = 0, fields = 0;
    for (;;) {
      const auto pos = line.find(',', start);
      const std::string field = line.substr(start, pos == std::string::npos ? pos : pos - start);
      values.push_back(static_cast<float>(
          parse_double(field, csv_path + " row " + std::to_string(lineno))));
      ++fields;
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (fields != d) {
      throw ValidationError(csv_path + " row " + std::to_string(lineno) + " has " +
                            std::to_string(fields) + " values, expected window length " +
                            std::to_string(d));
    }
  }
  if (values.size() != ids.size() * n * d) {
    throw ValidationError(csv_path + ": got " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(ids.size() * n * d) + " (" +
                          std::to_string(ids.size()) + " subsignals x " + std::to_string(n) +
                          " links x " + std::to_string(d) + ")");
  }

  const auto start_time = std::chrono::steady_clock::now();
  EvalReport report;
  report.split = split_name(split);
  std::size_t offset = 0;
  for (const std::uint32_t id : ids) {
    Tensor recon({n, d}, std::vector<float>(values.begin() + offset, values.begin() + offset + n * d));
    offset += n * d;
    const auto& target = dataset.subsignals[id].data;
    report.per_subsignal_mse.push_back(subsignal_mse(recon, target));
    report.per_subsignal_mae.push_back(subsignal_mae(recon, target));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    report.mse += report.per_subsignal_mse[i];
    report.mae += report.per_subsignal_mae[i];
  }
  report.mse /= static_cast<double>(ids.size());
  report.mae /= static_cast<double>(ids.size());
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return report;
}

void dump_reconstructions(const ParamStore& params, const TrainConfig& config,
                          const TrafficDataset& dataset, Split split, const std::string& path) {
  const auto ids = dataset.split_ids(split);
  const ModelContext ctx = make_model_context(config, dataset.link_names);
  NoGradGuard guard;
  std::string out;
  for (const std::uint32_t id : ids) {
    const Tensor recon = model_reconstruct(params, config, dataset.subsignals[id].data, ctx);
    for (std::size_t r = 0; r < recon.rows(); ++r) {
      for (std::size_t c = 0; c < recon.cols(); ++c) {
        if (c) out += ',';
        out += format_double(static_cast<double>(recon.at(r, c)));
      }
      out += '\n';
    }
  }
  write_file_atomic(path, out);
}

void save_history(const std::vector<EpochRecord>& history, const std::string& path) {
  std::string out;
  for (const auto& rec : history) {
    ordered_json j;
    j["epoch"] = rec.epoch;
    j["train_mse"] = rec.train_mse;
    j["val_mse"] = rec.val_mse;
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

void save_eval_report(const EvalReport& report, const std::string& path) {
  ordered_json j;
  j["split"] = report.split;
  j["mse"] = report.mse;
  j["mae"] = report.mae;
  if (report.has_rc) {
    j["achieved_rc"] = report.achieved_rc.str();
    j["achieved_rc_value"] = report.achieved_rc.value();
  } else {
    j["achieved_rc"] = nullptr;
  }
  j["seed"] = report.seed;
  j["wall_seconds"] = report.wall_seconds;
  j["per_subsignal_mse"] = report.per_subsignal_mse;
  j["per_subsignal_mae"] = report.per_subsignal_mae;
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace tgsc
