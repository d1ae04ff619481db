#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgsc/baselines.hpp"
#include "tgsc/pipelines.hpp"
#include "tgsc/rational.hpp"
#include "tgsc/rng.hpp"
#include "tgsc/topo_infer.hpp"

namespace tgsc {

enum class ModelKind { kSetmp, kCombmp, kMpnn, kMlpAe };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kSetmp: return "setmp";
    case ModelKind::kCombmp: return "combmp";
    case ModelKind::kMpnn: return "mpnn";
    case ModelKind::kMlpAe: return "mlp_ae";
  }
  return "?";
}

inline ModelKind model_kind_from_name(const std::string& name) {
  if (name == "setmp") return ModelKind::kSetmp;
  if (name == "combmp") return ModelKind::kCombmp;
  if (name == "mpnn") return ModelKind::kMpnn;
  if (name == "mlp_ae") return ModelKind::kMlpAe;
  throw ParameterError("unknown model kind: " + name + " (setmp|combmp|mpnn|mlp_ae)");
}

// Everything a training run needs beyond the dataset itself.
struct TrainConfig {
  ModelKind kind = ModelKind::kSetmp;
  Ratio target_rc{1, 3};
  std::uint32_t p = 8;                // max hyperedge length
  std::uint32_t hidden = 20;          // d'
  std::uint32_t node_code = 2;        // d_V^c
  std::uint32_t hyperedge_code = 10;  // d_W^c
  std::uint32_t rounds = 1;           // T
  std::uint32_t edge_fanout = 2;      // k, CombMP intra-hyperedge edges per node
  std::uint32_t epochs = 200;
  std::uint32_t batch_size = 25;
  double learning_rate = 0.003;
  double epsilon = 0.001;
  std::uint64_t seed = 0;

  bool is_topological() const { return kind == ModelKind::kSetmp || kind == ModelKind::kCombmp; }

  PipelineDims pipeline_dims(std::uint32_t window) const {
    return PipelineDims{window, hidden, node_code, hyperedge_code};
  }
  MpnnDims mpnn_dims(std::uint32_t window) const {
    return MpnnDims{window, hidden, MpnnDims::final_dim_for(target_rc, window)};
  }
  MlpAeConfig ae_config(std::uint32_t n_links, std::uint32_t window) const {
    return MlpAeConfig{n_links, window, target_rc};
  }

  void validate(std::uint32_t n_links, std::uint32_t window) const {
    if (epochs < 1) throw ParameterError("epochs must be >= 1");
    if (batch_size < 1) throw ParameterError("batch size must be >= 1");
    if (target_rc.num <= 0 || target_rc.num > target_rc.den) {
      throw ParameterError("target compression factor must lie in (0, 1]");
    }
    if (window < 1) throw ParameterError("window must be >= 1");
    if (hidden < 2) throw ParameterError("hidden dimension d' must be >= 2");
    if (is_topological()) {
      if (p <= 4) throw ParameterError("hyperedge length p must exceed 4");
      if (n_links < p) throw ParameterError("dataset has fewer links than p");
      const std::uint32_t k = hyperedge_count_for(n_links, p);
      if (!detail::partition_feasible(n_links, k, p)) {
        throw ParameterError("N=" + std::to_string(n_links) + " links cannot form K=" +
                             std::to_string(k) + " hyperedges of sizes p-1/p with p=" +
                             std::to_string(p));
      }
      if (node_code < 1 || hyperedge_code < 1) {
        throw ParameterError("code dimensions must be positive");
      }
    }
    if (kind == ModelKind::kCombmp && edge_fanout < 1) {
      throw ParameterError("edge fan-out k must be >= 1");
    }
  }

  // Stored-floats-over-raw-floats for this configuration, per Eq-style
  // accounting: codes only, metadata excluded.
  Ratio achieved_rc(std::uint32_t n_links, std::uint32_t window) const {
    switch (kind) {
      case ModelKind::kSetmp:
      case ModelKind::kCombmp:
        return compression_ratio(n_links, window, hyperedge_count_for(n_links, p), node_code,
                                 hyperedge_code);
      case ModelKind::kMpnn:
        return Ratio(static_cast<std::int64_t>(MpnnDims::final_dim_for(target_rc, window)),
                     static_cast<std::int64_t>(window));
      case ModelKind::kMlpAe: {
        const MlpAeConfig cfg{n_links, window, target_rc};
        return Ratio(static_cast<std::int64_t>(cfg.bottleneck()),
                     static_cast<std::int64_t>(cfg.input_width()));
      }
    }
    throw ParameterError("unreachable model kind");
  }
};

// Static per-dataset structures (the MPNN line graph); topological models
// infer their structure per subsignal instead.
struct ModelContext {
  LineGraph line_graph;
  bool has_line_graph = false;
};

inline ModelContext make_model_context(const TrainConfig& cfg,
                                       const std::vector<std::string>& link_names) {
  ModelContext ctx;
  if (cfg.kind == ModelKind::kMpnn) {
    ctx.line_graph = build_line_graph(topology_from_link_names(link_names));
    ctx.has_line_graph = true;
  }
  return ctx;
}

template <typename T>
ParamStoreT<T> build_model_params(const TrainConfig& cfg, std::uint32_t n_links,
                                  std::uint32_t window, Rng& rng) {
  ParamStoreT<T> store;
  switch (cfg.kind) {
    case ModelKind::kSetmp:
      for (const auto& role : setmp_role_list()) {
        init_mlp_params(store, role, role_spec(role, cfg.pipeline_dims(window)), rng);
      }
      break;
    case ModelKind::kCombmp:
      for (const auto& role : combmp_role_list()) {
        init_mlp_params(store, role, role_spec(role, cfg.pipeline_dims(window)), rng);
      }
      break;
    case ModelKind::kMpnn:
      init_mpnn(store, cfg.mpnn_dims(window), rng);
      break;
    case ModelKind::kMlpAe:
      init_mlp_ae(store, cfg.ae_config(n_links, window), rng);
      break;
  }
  return store;
}

// One forward pass over a subsignal. Topology inference runs inside the
// pass for the topological models; the clustering consumes embedding
// values only, so the structure decision is a stop-gradient.
template <typename T>
struct SampleForward {
  std::vector<Var<T>> x_rows;
  Var<T> loss;                         // scalar MSE in normalized signal space
  std::vector<Var<T>> reconstruction;  // N rows [1,d]; single flat row for mlp_ae
  // Topological models only:
  CodeSet<T> codes;
  TopoStructure structure;
  bool has_codes = false;
};

template <typename T>
SampleForward<T> model_forward(const ParamStoreT<T>& store, const TrainConfig& cfg,
                               const TensorT<T>& subsignal, const ModelContext& ctx) {
  SampleForward<T> out;
  out.x_rows = make_row_vars(subsignal);
  const auto window = static_cast<std::uint32_t>(subsignal.cols());

  switch (cfg.kind) {
    case ModelKind::kSetmp:
    case ModelKind::kCombmp: {
      const PipelineDims dims = cfg.pipeline_dims(window);
      auto emb = embed_nodes(out.x_rows, store, role_spec(roles::kEncoder, dims));
      auto sim = snr_similarity(embedding_values(emb));
      auto partition = greedy_cluster(sim, cfg.p);
      if (cfg.kind == ModelKind::kCombmp) {
        partition.edges = infer_edges(sim, partition, cfg.edge_fanout);
      }
      out.structure = build_structure(partition);
      if (cfg.kind == ModelKind::kCombmp) {
        auto state = init_structure_embeddings(emb, out.structure, store, dims);
        state = combmp_rounds(state, out.structure, store, dims, cfg.rounds);
        out.codes = compress_combmp(out.x_rows, emb, state, out.structure, store, dims);
      } else {
        out.codes = compress_setmp(out.x_rows, emb, out.structure, store, dims);
      }
      out.has_codes = true;
      out.reconstruction = decompress(out.codes, out.structure.owner, store, dims);
      out.loss = reconstruction_mse(out.reconstruction, out.x_rows);
      break;
    }
    case ModelKind::kMpnn: {
      if (!ctx.has_line_graph) throw ParameterError("MPNN forward needs a line-graph context");
      auto mp = mpnn_compress(out.x_rows, ctx.line_graph, store, cfg.mpnn_dims(window));
      out.reconstruction = std::move(mp.reconstruction);
      out.loss = reconstruction_mse(out.reconstruction, out.x_rows);
      break;
    }
    case ModelKind::kMlpAe: {
      const auto n_links = static_cast<std::uint32_t>(subsignal.rows());
      const MlpAeConfig ae = cfg.ae_config(n_links, window);
      auto flat = concat_row(out.x_rows);
      auto recon = mlp_ae_forward(store, ae, flat);
      out.loss = mse(recon, flat);
      out.reconstruction = {std::move(recon)};
      break;
    }
  }
  return out;
}

// Reconstructed N x d values in normalized space. Callers evaluating
// without training should hold a NoGradGuard.
template <typename T>
TensorT<T> model_reconstruct(const ParamStoreT<T>& store, const TrainConfig& cfg,
                             const TensorT<T>& subsignal, const ModelContext& ctx) {
  auto fwd = model_forward(store, cfg, subsignal, ctx);
  TensorT<T> out = TensorT<T>::zeros({subsignal.rows(), subsignal.cols()});
  std::size_t offset = 0;
  for (const auto& row : fwd.reconstruction) {
    std::copy(row.values().begin(), row.values().end(), out.values.begin() + offset);
    offset += row.values().size();
  }
  if (offset != out.values.size()) throw DimensionError("reconstruction size mismatch");
  return out;
}

}  // namespace tgsc
