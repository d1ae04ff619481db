#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tgsc/artifact.hpp"
#include "tgsc/checkpoint.hpp"
#include "tgsc/dataset.hpp"
#include "tgsc/harness.hpp"
#include "tgsc/io_util.hpp"
#include "tgsc/routing.hpp"
#include "tgsc/series.hpp"
#include "tgsc/sndlib.hpp"

namespace {

using namespace tgsc;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitFormat = 4;

Ratio parse_ratio(const std::string& text) {
  const auto pos = text.find('/');
  if (pos == std::string::npos || pos == 0 || pos + 1 == text.size()) {
    throw ParameterError("compression factor must be a fraction NUM/DEN, got '" + text + "'");
  }
  try {
    return Ratio(std::stoll(text.substr(0, pos)), std::stoll(text.substr(pos + 1)));
  } catch (const std::exception&) {
    throw ParameterError("compression factor must be a fraction NUM/DEN, got '" + text + "'");
  }
}

void require_readable(const std::vector<std::string>& paths) {
  for (const auto& p : paths) {
    if (!std::filesystem::exists(p)) throw ParseError("cannot open: " + p);
  }
}

struct TrainArgs {
  std::string manifest;
  std::string out_dir;
  std::string model = "setmp";
  std::string rc = "1/3";
  TrainConfig cfg;
};

TrainConfig make_config(const TrainArgs& args) {
  TrainConfig cfg = args.cfg;
  cfg.kind = model_kind_from_name(args.model);
  cfg.target_rc = parse_ratio(args.rc);
  return cfg;
}

int cmd_ingest(const std::vector<std::string>& sndlib_files, const std::string& csv_file,
               std::uint32_t window, std::uint64_t seed, double interval_seconds,
               const std::string& out_dir) {
  LinkSeries series;
  if (!sndlib_files.empty()) {
    require_readable(sndlib_files);
    auto data = parse_topology_and_demands(sndlib_files);
    if (data.intervals.empty()) {
      throw ValidationError("no <demands> blocks found in the given files");
    }
    series = route_demands(data.topology, data.intervals, interval_seconds);
  } else if (!csv_file.empty()) {
    require_readable({csv_file});
    series = load_csv_series(csv_file, interval_seconds);
  } else {
    throw ParameterError("ingest needs --sndlib or --csv input");
  }

  auto dataset = window_and_split(series, window, seed);
  save_dataset(dataset, out_dir);

  const auto train_n = dataset.split_ids(Split::kTrain).size();
  const auto val_n = dataset.split_ids(Split::kVal).size();
  const auto test_n = dataset.split_ids(Split::kTest).size();
  std::printf("links: %u\n", dataset.n_links);
  std::printf("window: %u\n", dataset.window);
  std::printf("subsignals: %zu (train %zu / val %zu / test %zu)\n", dataset.subsignals.size(),
              train_n, val_n, test_n);
  std::printf("normalization: min=%s max=%s\n", format_double(dataset.norm_min).c_str(),
              format_double(dataset.norm_max).c_str());
  std::printf("manifest: %s\n", (out_dir + "/manifest.json").c_str());
  return kExitOk;
}

int cmd_train(const TrainArgs& args) {
  require_readable({args.manifest});
  auto dataset = load_dataset(args.manifest);
  TrainConfig cfg = make_config(args);
  cfg.validate(dataset.n_links, dataset.window);

  auto result = train(cfg, dataset);
  std::filesystem::create_directories(args.out_dir);
  Checkpoint ckpt{cfg, dataset.n_links, dataset.window, std::move(result.params), 0};
  const std::string ckpt_path = args.out_dir + "/model.ckpt";
  const std::uint64_t model_id = save_checkpoint(ckpt, ckpt_path);
  save_history(result.history, args.out_dir + "/history.jsonl");

  const Ratio rc = cfg.achieved_rc(dataset.n_links, dataset.window);
  std::printf("model: %s\n", model_kind_name(cfg.kind));
  std::printf("achieved r_c: %s (%s)\n", rc.str().c_str(), format_double(rc.value()).c_str());
  std::printf("epochs run: %zu%s\n", result.history.size(), result.diverged ? " (diverged)" : "");
  std::printf("best epoch: %u\n", result.best_epoch);
  if (!result.history.empty()) {
    std::printf("best val mse: %s\n",
                format_double(result.history[result.best_epoch - 1].val_mse).c_str());
  }
  std::printf("checkpoint: %s (model id %016llx)\n", ckpt_path.c_str(),
              static_cast<unsigned long long>(model_id));
  return kExitOk;
}

int cmd_compress(const std::string& ckpt_path, const std::string& manifest,
                 std::uint32_t subsignal_id, const std::string& out_path) {
  require_readable({ckpt_path, manifest});
  auto ckpt = load_checkpoint(ckpt_path);
  auto dataset = load_dataset(manifest);
  if (!ckpt.config.is_topological()) {
    throw ParameterError("compressed artifacts are produced by setmp/combmp checkpoints only");
  }
  if (ckpt.n_links != dataset.n_links || ckpt.window != dataset.window) {
    throw CompatibilityError("checkpoint was trained for " + std::to_string(ckpt.n_links) +
                             " links x " + std::to_string(ckpt.window) +
                             " window, dataset has " + std::to_string(dataset.n_links) + " x " +
                             std::to_string(dataset.window));
  }
  if (subsignal_id >= dataset.subsignals.size()) {
    throw ValidationError("subsignal id " + std::to_string(subsignal_id) + " out of range (" +
                          std::to_string(dataset.subsignals.size()) + " subsignals)");
  }

  NoGradGuard guard;
  ModelContext ctx;
  auto fwd = model_forward(ckpt.params, ckpt.config, dataset.subsignals[subsignal_id].data, ctx);
  auto artifact = make_artifact(fwd.codes, fwd.structure, ckpt.config.pipeline_dims(dataset.window),
                                dataset.window, ckpt.model_id, dataset.norm_min, dataset.norm_max);
  save_artifact(artifact, out_path);
  std::printf("artifact: %s\n", out_path.c_str());
  std::printf("stored floats: %zu (= %u x %u + %u x %u)\n", artifact.stored_float_count(),
              artifact.n_nodes, artifact.node_code_dim, artifact.n_hyperedges,
              artifact.hyperedge_code_dim);
  std::printf("r_c: %s\n", artifact.achieved_ratio().str().c_str());
  return kExitOk;
}

int cmd_decompress(const std::string& ckpt_path, const std::string& artifact_path,
                   const std::string& out_path) {
  require_readable({ckpt_path, artifact_path});
  auto ckpt = load_checkpoint(ckpt_path);
  auto artifact = load_artifact(artifact_path);
  if (artifact.model_id != ckpt.model_id) {
    throw CompatibilityError("artifact was produced by a different model (id mismatch)");
  }
  const PipelineDims dims = ckpt.config.pipeline_dims(artifact.window);
  if (artifact.node_code_dim != dims.node_code ||
      artifact.hyperedge_code_dim != dims.hyperedge_code) {
    throw CompatibilityError("artifact code dimensions do not match the checkpoint");
  }

  NoGradGuard guard;
  CodeSet<float> codes;
  for (std::uint32_t v = 0; v < artifact.n_nodes; ++v) {
    std::vector<float> row(artifact.node_codes.begin() + v * artifact.node_code_dim,
                           artifact.node_codes.begin() + (v + 1) * artifact.node_code_dim);
    codes.node_codes.push_back(Var<float>::constant(Tensor::row(std::move(row))));
  }
  for (std::uint32_t w = 0; w < artifact.n_hyperedges; ++w) {
    std::vector<float> row(artifact.hyperedge_codes.begin() + w * artifact.hyperedge_code_dim,
                           artifact.hyperedge_codes.begin() + (w + 1) * artifact.hyperedge_code_dim);
    codes.hyperedge_codes.push_back(Var<float>::constant(Tensor::row(std::move(row))));
  }
  std::vector<std::uint32_t> owner(artifact.node_owner.begin(), artifact.node_owner.end());
  auto recon = decompress(codes, owner, ckpt.params, dims);

  // Denormalize with the artifact's own constants; artifacts are
  // self-contained.
  const double span = artifact.norm_max - artifact.norm_min;
  std::string out;
  for (const auto& row : recon) {
    for (std::size_t c = 0; c < row.values().size(); ++c) {
      if (c) out += ',';
      out += format_double(static_cast<double>(row.values()[c]) * span + artifact.norm_min);
    }
    out += '\n';
  }
  write_file_atomic(out_path, out);
  std::printf("reconstruction: %s (%u rows x %u columns)\n", out_path.c_str(), artifact.n_nodes,
              artifact.window);
  return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& manifest, const std::string& split,
             const std::string& external, const std::string& dump_recon,
             const std::string& out_path) {
  require_readable({ckpt_path, manifest});
  auto ckpt = load_checkpoint(ckpt_path);
  auto dataset = load_dataset(manifest);
  const Split s = split_from_name(split);

  if (!dump_recon.empty()) {
    dump_reconstructions(ckpt.params, ckpt.config, dataset, s, dump_recon);
    std::printf("reconstructions: %s\n", dump_recon.c_str());
  }

  EvalReport report;
  if (!external.empty()) {
    require_readable({external});
    report = compare_external(external, dataset, s);
    report.seed = ckpt.config.seed;
  } else {
    report = evaluate(ckpt.params, ckpt.config, dataset, s);
  }
  if (!out_path.empty()) save_eval_report(report, out_path);

  std::printf("split: %s\n", report.split.c_str());
  std::printf("mse: %s\n", format_double(report.mse).c_str());
  std::printf("mae: %s\n", format_double(report.mae).c_str());
  if (report.has_rc) {
    std::printf("achieved r_c: %s (%s)\n", report.achieved_rc.str().c_str(),
                format_double(report.achieved_rc.value()).c_str());
  }
  if (!out_path.empty()) std::printf("report: %s\n", out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological graph signal compression toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file mirroring the flags (flags take precedence)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse traffic data into a windowed dataset");
  std::vector<std::string> sndlib_files;
  std::string csv_file, out_dir;
  std::uint32_t window = 10;
  std::uint64_t seed = 0;
  double interval_seconds = 300.0;
  ingest->add_option("--sndlib", sndlib_files,
                     "SNDlib XML files (topology first, then demand matrices)");
  ingest->add_option("--csv", csv_file, "Link series CSV (header = link names)");
  ingest->add_option("--window", window, "Temporal window length d")->required();
  ingest->add_option("--seed", seed, "Split seed")->required();
  ingest->add_option("--interval", interval_seconds, "Interval duration in seconds");
  ingest->add_option("--out", out_dir, "Output dataset directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a compression model");
  TrainArgs targs;
  train_cmd->add_option("--manifest", targs.manifest, "Dataset manifest path")->required();
  train_cmd->add_option("--model", targs.model, "setmp|combmp|mpnn|mlp_ae");
  train_cmd->add_option("--rc", targs.rc, "Target compression factor NUM/DEN");
  train_cmd->add_option("--p", targs.cfg.p, "Max hyperedge length");
  train_cmd->add_option("--hidden", targs.cfg.hidden, "Hidden dimension d'");
  train_cmd->add_option("--dvc", targs.cfg.node_code, "Node code dimension");
  train_cmd->add_option("--dwc", targs.cfg.hyperedge_code, "Hyperedge code dimension");
  train_cmd->add_option("--T", targs.cfg.rounds, "Message passing iterations");
  train_cmd->add_option("--k", targs.cfg.edge_fanout, "Intra-hyperedge edge fan-out");
  train_cmd->add_option("--epochs", targs.cfg.epochs, "Max epochs");
  train_cmd->add_option("--batch", targs.cfg.batch_size, "Batch size");
  train_cmd->add_option("--lr", targs.cfg.learning_rate, "Adam learning rate");
  train_cmd->add_option("--eps", targs.cfg.epsilon, "Adam epsilon");
  train_cmd->add_option("--seed", targs.cfg.seed, "Training seed")->required();
  train_cmd->add_option("--out", targs.out_dir, "Output directory")->required();

  // compress
  auto* compress = app.add_subcommand("compress", "Compress one subsignal into an artifact");
  std::string ckpt_path, manifest_path, artifact_out;
  std::uint32_t subsignal_id = 0;
  compress->add_option("--checkpoint", ckpt_path, "Model checkpoint")->required();
  compress->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  compress->add_option("--subsignal", subsignal_id, "Subsignal id")->required();
  compress->add_option("--out", artifact_out, "Artifact output path")->required();

  // decompress
  auto* decompress_cmd = app.add_subcommand("decompress", "Reconstruct a subsignal from an artifact");
  std::string d_ckpt, d_artifact, d_out;
  decompress_cmd->add_option("--checkpoint", d_ckpt, "Model checkpoint")->required();
  decompress_cmd->add_option("--artifact", d_artifact, "Artifact path")->required();
  decompress_cmd->add_option("--out", d_out, "Reconstruction CSV output")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate reconstruction error over a split");
  std::string e_ckpt, e_manifest, e_split = "test", e_external, e_dump, e_out;
  eval_cmd->add_option("--checkpoint", e_ckpt, "Model checkpoint")->required();
  eval_cmd->add_option("--manifest", e_manifest, "Dataset manifest")->required();
  eval_cmd->add_option("--split", e_split, "train|val|test");
  eval_cmd->add_option("--external", e_external,
                       "External reconstructions CSV (normalized space) to score instead");
  eval_cmd->add_option("--dump-recon", e_dump, "Write this model's normalized reconstructions");
  eval_cmd->add_option("--out", e_out, "Report JSON output path");

  try {
    app.parse(argc, argv);
    if (*ingest) return cmd_ingest(sndlib_files, csv_file, window, seed, interval_seconds, out_dir);
    if (*train_cmd) return cmd_train(targs);
    if (*compress) return cmd_compress(ckpt_path, manifest_path, subsignal_id, artifact_out);
    if (*decompress_cmd) return cmd_decompress(d_ckpt, d_artifact, d_out);
    if (*eval_cmd) return cmd_eval(e_ckpt, e_manifest, e_split, e_external, e_dump, e_out);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const tgsc::FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitFormat;
  } catch (const tgsc::ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const tgsc::ValidationError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const tgsc::ParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const tgsc::CompatibilityError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
