#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgsc/autodiff.hpp"
#include "tgsc/mlp.hpp"
#include "tgsc/param_store.hpp"
#include "tgsc/topo_infer.hpp"

namespace tgsc {

// ---------------------------------------------------------------------------
// Roles and layer shapes
// ---------------------------------------------------------------------------
//
// Every learnable function is an MLP with a single hidden layer of width d'.
// Message functions (psi) take the concatenated receiver/sender states plus
// any residual inputs; update functions (phi) take the 3d'-wide mean/max/min
// aggregate of the incoming messages.

namespace roles {
inline constexpr const char* kEncoder = "enc";            // psi_V
inline constexpr const char* kEdgeInit = "e_init";        // phi_E
inline constexpr const char* kHyperedgeInit = "w_init";   // phi_W
inline constexpr const char* kEdgeEdgeMsg = "ee_msg";     // psi_{E->E}
inline constexpr const char* kEdgeEdgeUpd = "ee_upd";     // phi_{E->E}
inline constexpr const char* kEdgeHyperMsg = "ew_msg";    // psi_{E->W}
inline constexpr const char* kEdgeHyperUpd = "ew_upd";    // phi_{E->W}
inline constexpr const char* kHyperEdgeMsg = "we_msg";    // psi_{W->E}
inline constexpr const char* kHyperEdgeUpd = "we_upd";    // phi_{W->E}
inline constexpr const char* kEdgeNodeMsg = "ev_msg";     // psi_{E->V}, CombMP compression
inline constexpr const char* kEdgeNodeUpd = "ev_upd";     // phi_{E->V}
inline constexpr const char* kHyperNodeMsg = "wv_msg";    // psi_{W->V}, SetMP compression
inline constexpr const char* kHyperNodeUpd = "wv_upd";    // phi_{W->V}
inline constexpr const char* kNodeHyperMsg = "vw_msg";    // psi_{V->W}
inline constexpr const char* kNodeHyperUpd = "vw_upd";    // phi_{V->W}
inline constexpr const char* kDecoder = "dec";            // phi_dec
}  // namespace roles

struct PipelineDims {
  std::size_t window = 0;          // d, node signal length
  std::size_t hidden = 20;         // d', all intermediate states
  std::size_t node_code = 2;       // d_V^c
  std::size_t hyperedge_code = 10; // d_W^c
};

inline const std::vector<std::string>& setmp_role_list() {
  static const std::vector<std::string> kList = {
      roles::kEncoder,      roles::kHyperedgeInit, roles::kHyperNodeMsg, roles::kHyperNodeUpd,
      roles::kNodeHyperMsg, roles::kNodeHyperUpd,  roles::kDecoder};
  return kList;
}

inline const std::vector<std::string>& combmp_role_list() {
  static const std::vector<std::string> kList = {
      roles::kEncoder,      roles::kEdgeInit,     roles::kHyperedgeInit, roles::kEdgeEdgeMsg,
      roles::kEdgeEdgeUpd,  roles::kEdgeHyperMsg, roles::kEdgeHyperUpd,  roles::kHyperEdgeMsg,
      roles::kHyperEdgeUpd, roles::kEdgeNodeMsg,  roles::kEdgeNodeUpd,   roles::kNodeHyperMsg,
      roles::kNodeHyperUpd, roles::kDecoder};
  return kList;
}

inline MlpSpec role_spec(const std::string& role, const PipelineDims& dims) {
  const std::size_t d = dims.window, h = dims.hidden;
  const std::size_t dvc = dims.node_code, dwc = dims.hyperedge_code;
  if (role == roles::kEncoder) return {{d, h, h}, Activation::kRelu};
  if (role == roles::kEdgeInit || role == roles::kHyperedgeInit)
    return {{3 * h, h, h}, Activation::kRelu};
  if (role == roles::kEdgeEdgeMsg || role == roles::kEdgeHyperMsg || role == roles::kHyperEdgeMsg)
    return {{2 * h, h, h}, Activation::kRelu};
  if (role == roles::kEdgeEdgeUpd || role == roles::kEdgeHyperUpd || role == roles::kHyperEdgeUpd)
    return {{3 * h, h, h}, Activation::kRelu};
  if (role == roles::kEdgeNodeMsg || role == roles::kHyperNodeMsg)
    return {{d + 2 * h, h, h}, Activation::kRelu};
  if (role == roles::kEdgeNodeUpd || role == roles::kHyperNodeUpd)
    return {{3 * h, h, dvc}, Activation::kRelu};
  if (role == roles::kNodeHyperMsg) return {{d + dvc + h, h, h}, Activation::kRelu};
  if (role == roles::kNodeHyperUpd) return {{3 * h, h, dwc}, Activation::kRelu};
  if (role == roles::kDecoder) return {{dvc + dwc, h, d}, Activation::kRelu};
  throw ParameterError("unknown role: " + role);
}

// ---------------------------------------------------------------------------
// Topology bookkeeping
// ---------------------------------------------------------------------------

struct TopoStructure {
  HyperedgePartition partition;
  std::vector<std::uint32_t> owner;                         // node -> hyperedge
  std::vector<std::vector<std::uint32_t>> node_edges;       // node -> incident edges
  std::vector<std::vector<std::uint32_t>> edge_neighbors;   // edge -> edges sharing an endpoint
  std::vector<std::uint32_t> edge_owner;                    // edge -> hyperedge
  std::vector<std::vector<std::uint32_t>> hyperedge_edges;  // hyperedge -> edges

  bool has_edges() const { return !partition.edges.empty(); }
};

inline TopoStructure build_structure(const HyperedgePartition& partition) {
  partition.validate();
  TopoStructure s;
  s.partition = partition;
  s.owner = partition.node_to_hyperedge();
  s.node_edges.assign(partition.n, {});
  s.hyperedge_edges.assign(partition.hyperedges.size(), {});
  const auto& edges = partition.edges;
  s.edge_owner.assign(edges.size(), 0);
  s.edge_neighbors.assign(edges.size(), {});
  for (std::uint32_t e = 0; e < static_cast<std::uint32_t>(edges.size()); ++e) {
    const auto& [a, b] = edges[e];
    s.node_edges[a].push_back(e);
    s.node_edges[b].push_back(e);
    s.edge_owner[e] = s.owner[a];
    s.hyperedge_edges[s.owner[a]].push_back(e);
  }
  for (std::uint32_t e = 0; e < static_cast<std::uint32_t>(edges.size()); ++e) {
    for (std::uint32_t f = 0; f < static_cast<std::uint32_t>(edges.size()); ++f) {
      if (e == f) continue;
      const auto& [a, b] = edges[e];
      const auto& [c, d] = edges[f];
      if (a == c || a == d || b == c || b == d) s.edge_neighbors[e].push_back(f);
    }
  }
  return s;
}

// Hidden states of the three structure levels after t message rounds.
template <typename T>
struct TopoState {
  std::vector<Var<T>> nodes;       // N x [1,d']
  std::vector<Var<T>> edges;       // |E| x [1,d']
  std::vector<Var<T>> hyperedges;  // K x [1,d']
  std::uint32_t round = 0;
};

// Per-subsignal compressed codes, still attached to the graph.
template <typename T>
struct CodeSet {
  std::vector<Var<T>> node_codes;       // N x [1,d_V^c]
  std::vector<Var<T>> hyperedge_codes;  // K x [1,d_W^c]
};

namespace detail {

template <typename T>
Var<T> message(const ParamStoreT<T>& store, const std::string& role, const PipelineDims& dims,
               const std::vector<Var<T>>& parts) {
  return mlp_forward(store, role, role_spec(role, dims), concat_row(parts));
}

template <typename T>
Var<T> update(const ParamStoreT<T>& store, const std::string& role, const PipelineDims& dims,
              const std::vector<Var<T>>& messages) {
  return mlp_forward(store, role, role_spec(role, dims),
                     aggregate_mmm(messages, dims.hidden));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline stages
// ---------------------------------------------------------------------------

// h_e^0 = phi_E(agg of endpoint embeddings); h_w^0 = phi_W(agg of member
// embeddings). Node states alias the encoder outputs.
template <typename T>
TopoState<T> init_structure_embeddings(const std::vector<Var<T>>& node_embeddings,
                                       const TopoStructure& structure,
                                       const ParamStoreT<T>& store, const PipelineDims& dims) {
  if (node_embeddings.size() != structure.partition.n) {
    throw DimensionError("embedding count does not match partition size");
  }
  TopoState<T> state;
  state.nodes = node_embeddings;
  for (const auto& [a, b] : structure.partition.edges) {
    state.edges.push_back(detail::update(
        store, roles::kEdgeInit, dims,
        std::vector<Var<T>>{node_embeddings[a], node_embeddings[b]}));
  }
  for (const auto& members : structure.partition.hyperedges) {
    std::vector<Var<T>> member_embs;
    member_embs.reserve(members.size());
    for (std::uint32_t v : members) member_embs.push_back(node_embeddings[v]);
    state.hyperedges.push_back(
        detail::update(store, roles::kHyperedgeInit, dims, member_embs));
  }
  return state;
}

// One CombMP round: edge<->edge, edge->hyperedge, hyperedge->edge, and
// edge<->edge again; iterated T times. Empty neighborhoods aggregate to
// zero. The two edge<->edge exchanges share the E->E parameters.
template <typename T>
TopoState<T> combmp_rounds(TopoState<T> state, const TopoStructure& structure,
                           const ParamStoreT<T>& store, const PipelineDims& dims,
                           std::uint32_t iterations) {
  if (!structure.has_edges() && iterations > 0) {
    throw ParameterError(
        "CombMP message passing needs a nonempty edge set; use the SetMP pipeline for "
        "edge-free topologies");
  }
  const std::size_t n_edges = state.edges.size();

  auto edge_exchange = [&](const std::vector<Var<T>>& edges) {
    std::vector<Var<T>> next(n_edges);
    for (std::uint32_t e = 0; e < static_cast<std::uint32_t>(n_edges); ++e) {
      std::vector<Var<T>> msgs;
      msgs.reserve(structure.edge_neighbors[e].size());
      for (std::uint32_t f : structure.edge_neighbors[e]) {
        msgs.push_back(detail::message(store, roles::kEdgeEdgeMsg, dims, {edges[e], edges[f]}));
      }
      next[e] = detail::update(store, roles::kEdgeEdgeUpd, dims, msgs);
    }
    return next;
  };

  for (std::uint32_t t = 0; t < iterations; ++t) {
    auto edges1 = edge_exchange(state.edges);

    std::vector<Var<T>> hyper1(state.hyperedges.size());
    for (std::uint32_t w = 0; w < static_cast<std::uint32_t>(state.hyperedges.size()); ++w) {
      std::vector<Var<T>> msgs;
      msgs.reserve(structure.hyperedge_edges[w].size());
      for (std::uint32_t e : structure.hyperedge_edges[w]) {
        msgs.push_back(
            detail::message(store, roles::kEdgeHyperMsg, dims, {state.hyperedges[w], edges1[e]}));
      }
      hyper1[w] = detail::update(store, roles::kEdgeHyperUpd, dims, msgs);
    }

    std::vector<Var<T>> edges2(n_edges);
    for (std::uint32_t e = 0; e < static_cast<std::uint32_t>(n_edges); ++e) {
      auto msg = detail::message(store, roles::kHyperEdgeMsg, dims,
                                 {edges1[e], hyper1[structure.edge_owner[e]]});
      edges2[e] = detail::update(store, roles::kHyperEdgeUpd, dims, std::vector<Var<T>>{msg});
    }

    state.edges = edge_exchange(edges2);
    state.hyperedges = std::move(hyper1);
    state.round += 1;
  }
  return state;
}

// CombMP compression. Node codes aggregate psi(x_v, h_v^0, h_e^t) over the
// node's incident edges (isolated nodes aggregate to zero); when the edge
// set is empty the hyperedge state stands in as the message source, which
// is exactly the SetMP node compression. Hyperedge codes then aggregate
// psi(x_v, h_v^c, h_w^t) over members.
template <typename T>
CodeSet<T> compress_combmp(const std::vector<Var<T>>& x_rows,
                           const std::vector<Var<T>>& node_embeddings, const TopoState<T>& state,
                           const TopoStructure& structure, const ParamStoreT<T>& store,
                           const PipelineDims& dims) {
  if (structure.has_edges() && state.round < 1) {
    throw ParameterError("CombMP compression requires at least one executed message round");
  }
  const std::size_t n = structure.partition.n;
  CodeSet<T> codes;
  codes.node_codes.resize(n);
  if (!structure.has_edges()) {
    for (std::uint32_t v = 0; v < static_cast<std::uint32_t>(n); ++v) {
      auto msg = detail::message(store, roles::kHyperNodeMsg, dims,
                                 {x_rows[v], node_embeddings[v], state.hyperedges[structure.owner[v]]});
      codes.node_codes[v] =
          detail::update(store, roles::kHyperNodeUpd, dims, std::vector<Var<T>>{msg});
    }
  } else {
    for (std::uint32_t v = 0; v < static_cast<std::uint32_t>(n); ++v) {
      std::vector<Var<T>> msgs;
      msgs.reserve(structure.node_edges[v].size());
      for (std::uint32_t e : structure.node_edges[v]) {
        msgs.push_back(detail::message(store, roles::kEdgeNodeMsg, dims,
                                       {x_rows[v], node_embeddings[v], state.edges[e]}));
      }
      codes.node_codes[v] = detail::update(store, roles::kEdgeNodeUpd, dims, msgs);
    }
  }

  codes.hyperedge_codes.resize(structure.partition.hyperedges.size());
  for (std::uint32_t w = 0; w < static_cast<std::uint32_t>(structure.partition.hyperedges.size()); ++w) {
    std::vector<Var<T>> msgs;
    for (std::uint32_t v : structure.partition.hyperedges[w]) {
      msgs.push_back(detail::message(store, roles::kNodeHyperMsg, dims,
                                     {x_rows[v], codes.node_codes[v], state.hyperedges[w]}));
    }
    codes.hyperedge_codes[w] = detail::update(store, roles::kNodeHyperUpd, dims, msgs);
  }
  return codes;
}

// SetMP: edge-free compression straight between nodes and their unique
// hyperedge, with un-updated hyperedge embeddings h_w^0 throughout.
template <typename T>
CodeSet<T> compress_setmp(const std::vector<Var<T>>& x_rows,
                          const std::vector<Var<T>>& node_embeddings,
                          const TopoStructure& structure, const ParamStoreT<T>& store,
                          const PipelineDims& dims) {
  TopoStructure edge_free = structure;
  edge_free.partition.edges.clear();
  auto state = init_structure_embeddings(node_embeddings, edge_free, store, dims);
  return compress_combmp(x_rows, node_embeddings, state, edge_free, store, dims);
}

// x_hat_v = dec(h_v^c, h_w^c) per node.
template <typename T>
std::vector<Var<T>> decompress(const CodeSet<T>& codes, const std::vector<std::uint32_t>& owner,
                               const ParamStoreT<T>& store, const PipelineDims& dims) {
  const MlpSpec spec = role_spec(roles::kDecoder, dims);
  std::vector<Var<T>> out;
  out.reserve(codes.node_codes.size());
  for (std::size_t v = 0; v < codes.node_codes.size(); ++v) {
    out.push_back(mlp_forward(store, roles::kDecoder, spec,
                              concat_row(std::vector<Var<T>>{
                                  codes.node_codes[v], codes.hyperedge_codes[owner[v]]})));
  }
  return out;
}

// Mean squared reconstruction error over all N x d elements of a sample.
template <typename T>
Var<T> reconstruction_mse(const std::vector<Var<T>>& reconstructed,
                          const std::vector<Var<T>>& x_rows) {
  if (reconstructed.size() != x_rows.size()) {
    throw DimensionError("reconstruction row count mismatch");
  }
  Var<T> total;
  for (std::size_t v = 0; v < x_rows.size(); ++v) {
    auto diff = sub(reconstructed[v], x_rows[v]);
    auto se = sum_all(mul(diff, diff));
    total = total.valid() ? add(total, se) : se;
  }
  const auto count = static_cast<T>(x_rows.size() * x_rows[0].cols());
  return scale(total, T(1) / count);
}

}  // namespace tgsc
