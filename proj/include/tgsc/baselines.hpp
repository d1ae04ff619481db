#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tgsc/autodiff.hpp"
#include "tgsc/mlp.hpp"
#include "tgsc/param_store.hpp"
#include "tgsc/pipelines.hpp"
#include "tgsc/rational.hpp"
#include "tgsc/topology.hpp"

namespace tgsc {

// ---------------------------------------------------------------------------
// Line graph
// ---------------------------------------------------------------------------

// Dual graph of the network: nodes are the original directed links,
// adjacent iff the links share any endpoint. Carries the per-link signal
// for the graph baselines.
struct LineGraph {
  std::size_t n = 0;                                          // original link count
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // adjacency pairs, first < second
  std::vector<std::vector<std::uint32_t>> node_edges;         // node -> incident edge ids
  std::vector<std::vector<std::uint32_t>> edge_neighbors;     // edge -> edges sharing a node

  bool adjacent(std::uint32_t a, std::uint32_t b) const {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    return std::binary_search(edges.begin(), edges.end(), key);
  }
};

inline LineGraph build_line_graph(const NetworkTopology& topology) {
  LineGraph lg;
  lg.n = topology.link_count();
  const auto& links = topology.links();
  for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(lg.n); ++i) {
    for (std::uint32_t j = i + 1; j < static_cast<std::uint32_t>(lg.n); ++j) {
      const auto& a = links[i];
      const auto& b = links[j];
      if (a.source == b.source || a.source == b.target || a.target == b.source ||
          a.target == b.target) {
        lg.edges.emplace_back(i, j);
      }
    }
  }
  lg.node_edges.assign(lg.n, {});
  lg.edge_neighbors.assign(lg.edges.size(), {});
  for (std::uint32_t e = 0; e < static_cast<std::uint32_t>(lg.edges.size()); ++e) {
    lg.node_edges[lg.edges[e].first].push_back(e);
    lg.node_edges[lg.edges[e].second].push_back(e);
  }
  for (std::uint32_t e = 0; e < static_cast<std::uint32_t>(lg.edges.size()); ++e) {
    const auto& [a, b] = lg.edges[e];
    for (std::uint32_t f : lg.node_edges[a]) {
      if (f != e) lg.edge_neighbors[e].push_back(f);
    }
    for (std::uint32_t f : lg.node_edges[b]) {
      if (f != e) lg.edge_neighbors[e].push_back(f);
    }
    std::sort(lg.edge_neighbors[e].begin(), lg.edge_neighbors[e].end());
    lg.edge_neighbors[e].erase(
        std::unique(lg.edge_neighbors[e].begin(), lg.edge_neighbors[e].end()),
        lg.edge_neighbors[e].end());
  }
  return lg;
}

// Rebuilds the directed topology from "SRC>DST" link names, the convention
// the ingestion pipeline writes. Lets the line-graph baselines work from a
// dataset manifest alone.
inline NetworkTopology topology_from_link_names(const std::vector<std::string>& names) {
  NetworkTopology topo;
  for (const auto& name : names) {
    const auto pos = name.find('>');
    if (pos == std::string::npos || pos == 0 || pos + 1 == name.size()) {
      throw ValidationError("link name '" + name +
                            "' does not encode a directed link as SRC>DST; the line-graph "
                            "baselines need topology-bearing link names");
    }
  }
  for (const auto& name : names) {
    const auto pos = name.find('>');
    const auto src = topo.add_node(name.substr(0, pos));
    const auto dst = topo.add_node(name.substr(pos + 1));
    topo.add_link(src, dst, name);
  }
  return topo;
}

// ---------------------------------------------------------------------------
// MLP auto-encoder baseline
// ---------------------------------------------------------------------------

// Flattened subsignal -> (h1, h2, bottleneck) -> symmetric decoder. The
// bottleneck is ceil(r_c * N * d) wide; hidden activations are ReLU, the
// bottleneck and the output are linear.
struct MlpAeConfig {
  std::size_t n_links = 0;
  std::size_t window = 0;
  Ratio target_rc{1, 3};
  std::size_t hidden1 = 1024;
  std::size_t hidden2 = 512;

  std::size_t input_width() const { return n_links * window; }
  std::size_t bottleneck() const {
    const auto in = static_cast<std::int64_t>(input_width());
    return static_cast<std::size_t>((target_rc.num * in + target_rc.den - 1) / target_rc.den);
  }
  MlpSpec encoder_spec() const {
    return {{input_width(), hidden1, hidden2, bottleneck()}, Activation::kRelu};
  }
  MlpSpec decoder_spec() const {
    return {{bottleneck(), hidden2, hidden1, input_width()}, Activation::kRelu};
  }
};

inline constexpr const char* kAeEncoderRole = "ae_enc";
inline constexpr const char* kAeDecoderRole = "ae_dec";

template <typename T>
void init_mlp_ae(ParamStoreT<T>& store, const MlpAeConfig& cfg, Rng& rng) {
  init_mlp_params(store, kAeEncoderRole, cfg.encoder_spec(), rng);
  init_mlp_params(store, kAeDecoderRole, cfg.decoder_spec(), rng);
}

// Encoded-then-decoded flattened subsignal, [1, N*d] in and out.
template <typename T>
Var<T> mlp_ae_forward(const ParamStoreT<T>& store, const MlpAeConfig& cfg, const Var<T>& flat) {
  auto code = mlp_forward(store, kAeEncoderRole, cfg.encoder_spec(), flat);
  return mlp_forward(store, kAeDecoderRole, cfg.decoder_spec(), code);
}

// Closed-form weight+bias count, a pure function of (N, d, r_c).
inline std::size_t mlp_ae_parameter_count(const MlpAeConfig& cfg) {
  return cfg.encoder_spec().parameter_count() + cfg.decoder_spec().parameter_count();
}

// ---------------------------------------------------------------------------
// Custom MPNN baseline over the line graph
// ---------------------------------------------------------------------------

struct MpnnDims {
  std::size_t window = 0;     // d
  std::size_t hidden = 20;    // d'
  std::size_t final_dim = 4;  // per-node code width

  static std::size_t final_dim_for(const Ratio& rc, std::size_t window) {
    const auto w = static_cast<std::int64_t>(window);
    return static_cast<std::size_t>((rc.num * w + rc.den - 1) / rc.den);  // ceil(rc * d)
  }
};

namespace mpnn_roles {
inline constexpr const char* kEncoder = "enc";
inline constexpr const char* kEdgeInit = "e_init";
inline constexpr const char* kEdgeEdgeMsg = "ee_msg";
inline constexpr const char* kEdgeEdgeUpd = "ee_upd";
inline constexpr const char* kEdgeNodeMsg = "en_msg";
inline constexpr const char* kEdgeNodeUpd = "en_upd";
inline constexpr const char* kNodeEdgeMsg = "ne_msg";
inline constexpr const char* kNodeEdgeUpd = "ne_upd";
inline constexpr const char* kCompressMsg = "cmp_msg";
inline constexpr const char* kCompressUpd = "cmp_upd";
inline constexpr const char* kDecoder = "dec";
}  // namespace mpnn_roles

inline MlpSpec mpnn_role_spec(const std::string& role, const MpnnDims& dims) {
  const std::size_t d = dims.window, h = dims.hidden, f = dims.final_dim;
  using namespace mpnn_roles;
  if (role == kEncoder) return {{d, h, h}, Activation::kRelu};
  if (role == kEdgeInit) return {{3 * h, h, h}, Activation::kRelu};
  if (role == kEdgeEdgeMsg || role == kEdgeNodeMsg || role == kNodeEdgeMsg)
    return {{2 * h, h, h}, Activation::kRelu};
  if (role == kEdgeEdgeUpd || role == kEdgeNodeUpd || role == kNodeEdgeUpd)
    return {{3 * h, h, h}, Activation::kRelu};
  if (role == kCompressMsg) return {{d + 2 * h, h, h}, Activation::kRelu};
  if (role == kCompressUpd) return {{3 * h, h, f}, Activation::kRelu};
  if (role == kDecoder) return {{f, h, d}, Activation::kRelu};
  throw ParameterError("unknown mpnn role: " + role);
}

inline const std::vector<std::string>& mpnn_role_list() {
  static const std::vector<std::string> kList = {
      mpnn_roles::kEncoder,     mpnn_roles::kEdgeInit,    mpnn_roles::kEdgeEdgeMsg,
      mpnn_roles::kEdgeEdgeUpd, mpnn_roles::kEdgeNodeMsg, mpnn_roles::kEdgeNodeUpd,
      mpnn_roles::kNodeEdgeMsg, mpnn_roles::kNodeEdgeUpd, mpnn_roles::kCompressMsg,
      mpnn_roles::kCompressUpd, mpnn_roles::kDecoder};
  return kList;
}

template <typename T>
void init_mpnn(ParamStoreT<T>& store, const MpnnDims& dims, Rng& rng) {
  for (const auto& role : mpnn_role_list()) {
    init_mlp_params(store, role, mpnn_role_spec(role, dims), rng);
  }
}

template <typename T>
struct MpnnOutput {
  std::vector<Var<T>> node_codes;      // N x [1, final_dim]
  std::vector<Var<T>> reconstruction;  // N x [1, d]
};

// One pass of the four-step sequence: edge<->edge, edges->nodes,
// nodes->edges, and a final edges->nodes step with a residual connection
// to the raw node signal, which emits the compressed code. Aggregations
// over empty neighborhoods yield zeros, so isolated line-graph nodes are
// well-defined.
template <typename T>
MpnnOutput<T> mpnn_compress(const std::vector<Var<T>>& x_rows, const LineGraph& graph,
                            const ParamStoreT<T>& store, const MpnnDims& dims) {
  using namespace mpnn_roles;
  if (x_rows.size() != graph.n) {
    throw DimensionError("subsignal row count does not match line graph node count");
  }
  const std::size_t h = dims.hidden;
  auto psi = [&](const char* role, const std::vector<Var<T>>& parts) {
    return mlp_forward(store, role, mpnn_role_spec(role, dims), concat_row(parts));
  };
  auto phi = [&](const char* role, const std::vector<Var<T>>& msgs) {
    return mlp_forward(store, role, mpnn_role_spec(role, dims), aggregate_mmm(msgs, h));
  };

  std::vector<Var<T>> hv0;
  hv0.reserve(graph.n);
  for (const auto& x : x_rows) {
    hv0.push_back(mlp_forward(store, kEncoder, mpnn_role_spec(kEncoder, dims), x));
  }
  std::vector<Var<T>> he0;
  he0.reserve(graph.edges.size());
  for (const auto& [a, b] : graph.edges) he0.push_back(phi(kEdgeInit, {hv0[a], hv0[b]}));

  // 1) edge <-> edge
  std::vector<Var<T>> he1(he0.size());
  for (std::size_t e = 0; e < he0.size(); ++e) {
    std::vector<Var<T>> msgs;
    for (auto f : graph.edge_neighbors[e]) msgs.push_back(psi(kEdgeEdgeMsg, {he0[e], he0[f]}));
    he1[e] = phi(kEdgeEdgeUpd, msgs);
  }
  // 2) edges -> nodes
  std::vector<Var<T>> hv1(graph.n);
  for (std::size_t v = 0; v < graph.n; ++v) {
    std::vector<Var<T>> msgs;
    for (auto e : graph.node_edges[v]) msgs.push_back(psi(kEdgeNodeMsg, {hv0[v], he1[e]}));
    hv1[v] = phi(kEdgeNodeUpd, msgs);
  }
  // 3) nodes -> edges
  std::vector<Var<T>> he2(he0.size());
  for (std::size_t e = 0; e < he0.size(); ++e) {
    const auto& [a, b] = graph.edges[e];
    std::vector<Var<T>> msgs{psi(kNodeEdgeMsg, {he1[e], hv1[a]}),
                             psi(kNodeEdgeMsg, {he1[e], hv1[b]})};
    he2[e] = phi(kNodeEdgeUpd, msgs);
  }
  // 4) final edges -> nodes with residual, emitting the code
  MpnnOutput<T> out;
  out.node_codes.resize(graph.n);
  out.reconstruction.resize(graph.n);
  for (std::size_t v = 0; v < graph.n; ++v) {
    std::vector<Var<T>> msgs;
    for (auto e : graph.node_edges[v]) {
      msgs.push_back(psi(kCompressMsg, {x_rows[v], hv1[v], he2[e]}));
    }
    out.node_codes[v] = phi(kCompressUpd, msgs);
    out.reconstruction[v] =
        mlp_forward(store, kDecoder, mpnn_role_spec(kDecoder, dims), out.node_codes[v]);
  }
  return out;
}

}  // namespace tgsc
