#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tgsc/autodiff.hpp"
#include "tgsc/errors.hpp"
#include "tgsc/mlp.hpp"
#include "tgsc/param_store.hpp"

namespace tgsc {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

// Pairwise similarity over the N datapoints of one subsignal. Row u is the
// anchor; the matrix is intentionally not symmetric. Diagonal entries hold
// a -inf sentinel so self-pairs never rank anywhere.
template <typename T>
struct SimilarityMatrixT {
  std::size_t n = 0;
  std::vector<T> m;  // row-major n x n

  T& at(std::size_t u, std::size_t v) { return m[u * n + v]; }
  T at(std::size_t u, std::size_t v) const { return m[u * n + v]; }
};

using SimilarityMatrix = SimilarityMatrixT<float>;

// K disjoint index sets covering {0..N-1}, sizes in {p-1, p}, plus the
// optional intra-hyperedge edge list.
struct HyperedgePartition {
  std::uint32_t n = 0;
  std::uint32_t p = 0;
  std::vector<std::vector<std::uint32_t>> hyperedges;              // members sorted
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;      // undirected, first < second

  std::size_t hyperedge_count() const { return hyperedges.size(); }

  std::vector<std::uint32_t> node_to_hyperedge() const {
    std::vector<std::uint32_t> owner(n, std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t h = 0; h < hyperedges.size(); ++h) {
      for (std::uint32_t v : hyperedges[h]) owner.at(v) = h;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
      if (owner[v] == std::numeric_limits<std::uint32_t>::max()) {
        throw ValidationError("node " + std::to_string(v) + " is in no hyperedge");
      }
    }
    return owner;
  }

  void validate() const {
    std::vector<bool> seen(n, false);
    for (const auto& h : hyperedges) {
      if (h.size() != p && h.size() + 1 != p) {
        throw ValidationError("hyperedge size " + std::to_string(h.size()) +
                              " outside {p-1,p} for p=" + std::to_string(p));
      }
      for (std::uint32_t v : h) {
        if (v >= n || seen[v]) throw ValidationError("hyperedges are not a partition");
        seen[v] = true;
      }
    }
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!seen[v]) throw ValidationError("node " + std::to_string(v) + " uncovered");
    }
    const auto owner = node_to_hyperedge();
    for (const auto& [a, b] : edges) {
      if (a >= b || b >= n || owner[a] != owner[b]) {
        throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") is not intra-hyperedge");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Rows of a value matrix as constant graph inputs.
template <typename T>
std::vector<Var<T>> make_row_vars(const TensorT<T>& matrix) {
  const std::size_t rows = matrix.rows(), cols = matrix.cols();
  std::vector<Var<T>> out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<T> row(matrix.values.begin() + r * cols, matrix.values.begin() + (r + 1) * cols);
    out.push_back(Var<T>::constant(TensorT<T>({1, cols}, std::move(row))));
  }
  return out;
}

// h_j = encoder(x_j), per measurement row.
template <typename T>
std::vector<Var<T>> embed_nodes(const std::vector<Var<T>>& rows, const ParamStoreT<T>& store,
                                const MlpSpec& encoder_spec, const std::string& role = "enc") {
  std::vector<Var<T>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(mlp_forward(store, role, encoder_spec, row));
  return out;
}

// Detached N x d' value matrix; feeds the (non-differentiable) clustering.
template <typename T>
TensorT<T> embedding_values(const std::vector<Var<T>>& embeddings) {
  if (embeddings.empty()) throw ParameterError("no embeddings");
  const std::size_t cols = embeddings[0].cols();
  TensorT<T> out = TensorT<T>::zeros({embeddings.size(), cols});
  for (std::size_t r = 0; r < embeddings.size(); ++r) {
    std::copy(embeddings[r].values().begin(), embeddings[r].values().end(),
              out.values.begin() + r * cols);
  }
  return out;
}

// Negated SNR distance: m_uv = -Var(h_u - h_v) / (Var(h_u) + eps), with the
// population variance taken over the embedding components and row u as the
// anchor. Identical vectors score 0, the maximum attainable.
template <typename T>
SimilarityMatrixT<T> snr_similarity(const TensorT<T>& embeddings, double epsilon = 1e-8) {
  const std::size_t n = embeddings.rows(), d = embeddings.cols();
  if (d < 2) throw ParameterError("SNR similarity needs embedding dimension >= 2");
  SimilarityMatrixT<T> sim;
  sim.n = n;
  sim.m.assign(n * n, T(0));

  auto population_var = [d](const T* row) {
    double mean = 0;
    for (std::size_t j = 0; j < d; ++j) mean += static_cast<double>(row[j]);
    mean /= static_cast<double>(d);
    double var = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = static_cast<double>(row[j]) - mean;
      var += c * c;
    }
    return var / static_cast<double>(d);
  };

  std::vector<double> anchor_var(n);
  for (std::size_t u = 0; u < n; ++u) anchor_var[u] = population_var(&embeddings.values[u * d]);

  std::vector<T> diff(d);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) {
        sim.at(u, v) = -std::numeric_limits<T>::infinity();
        continue;
      }
      for (std::size_t j = 0; j < d; ++j) {
        diff[j] = embeddings.values[u * d + j] - embeddings.values[v * d + j];
      }
      const double dist = population_var(diff.data()) / (anchor_var[u] + epsilon);
      sim.at(u, v) = static_cast<T>(-dist);
    }
  }
  return sim;
}

namespace detail {

// Can `remaining` indices still be split into `sets` sets of size p-1 or p?
inline bool partition_feasible(std::size_t remaining, std::size_t sets, std::uint32_t p) {
  if (sets == 0) return remaining == 0;
  return sets * (p - 1) <= remaining && remaining <= sets * p;
}

}  // namespace detail

inline std::uint32_t hyperedge_count_for(std::uint32_t n, std::uint32_t p) {
  return static_cast<std::uint32_t>(
      std::lround(static_cast<double>(n) / static_cast<double>(p)));
}

// Greedy similarity clustering. Repeatedly ranks every remaining row by the
// sum of its top (s-1) remaining entries and extracts the winner's row plus
// selected columns as a hyperedge of size s. s is p while the leftover
// indices can still be partitioned into {p-1,p}-sized sets, and downgrades
// to p-1 exactly when they cannot. Ties: smallest row index, then smallest
// column index.
template <typename T>
HyperedgePartition greedy_cluster(const SimilarityMatrixT<T>& sim, std::uint32_t p) {
  const std::size_t n = sim.n;
  if (p <= 4) throw ParameterError("hyperedge length p must exceed 4");
  if (n < p) throw ParameterError("need at least p datapoints, got " + std::to_string(n));
  const std::uint32_t k = hyperedge_count_for(static_cast<std::uint32_t>(n), p);
  if (!detail::partition_feasible(n, k, p)) {
    throw ParameterError("N=" + std::to_string(n) + " cannot be covered by K=" + std::to_string(k) +
                         " hyperedges of sizes " + std::to_string(p - 1) + "/" + std::to_string(p));
  }

  HyperedgePartition part;
  part.n = static_cast<std::uint32_t>(n);
  part.p = p;

  std::vector<bool> alive(n, true);
  std::size_t remaining = n;
  std::vector<std::pair<T, std::uint32_t>> ranked;  // (-value, column) for ascending sort

  for (std::uint32_t sets_left = k; sets_left > 0; --sets_left) {
    const bool full = detail::partition_feasible(remaining - p, sets_left - 1, p);
    const std::uint32_t size = full ? p : p - 1;
    const std::uint32_t take = size - 1;

    double best_sum = -std::numeric_limits<double>::infinity();
    std::uint32_t best_row = 0;
    std::vector<std::uint32_t> best_cols;
    for (std::uint32_t u = 0; u < n; ++u) {
      if (!alive[u]) continue;
      ranked.clear();
      for (std::uint32_t v = 0; v < n; ++v) {
        if (!alive[v] || v == u) continue;
        ranked.emplace_back(-sim.at(u, v), v);
      }
      std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end());
      double sum = 0;
      for (std::uint32_t i = 0; i < take; ++i) sum += static_cast<double>(-ranked[i].first);
      if (sum > best_sum) {
        best_sum = sum;
        best_row = u;
        best_cols.clear();
        for (std::uint32_t i = 0; i < take; ++i) best_cols.push_back(ranked[i].second);
      }
    }

    std::vector<std::uint32_t> members{best_row};
    members.insert(members.end(), best_cols.begin(), best_cols.end());
    std::sort(members.begin(), members.end());
    for (std::uint32_t v : members) alive[v] = false;
    remaining -= members.size();
    part.hyperedges.push_back(std::move(members));
  }
  return part;
}

// Per node, up to k undirected edges to its highest-similarity peers within
// the same hyperedge, deduplicated.
template <typename T>
std::vector<std::pair<std::uint32_t, std::uint32_t>> infer_edges(const SimilarityMatrixT<T>& sim,
                                                                 const HyperedgePartition& partition,
                                                                 std::uint32_t k) {
  if (k < 1) throw ParameterError("edge fan-out k must be >= 1");
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& hyperedge : partition.hyperedges) {
    for (std::uint32_t u : hyperedge) {
      std::vector<std::pair<T, std::uint32_t>> peers;  // (-similarity, peer)
      for (std::uint32_t v : hyperedge) {
        if (v != u) peers.emplace_back(-sim.at(u, v), v);
      }
      std::sort(peers.begin(), peers.end());
      const std::size_t take = std::min<std::size_t>(k, peers.size());
      for (std::size_t i = 0; i < take; ++i) {
        const std::uint32_t v = peers[i].second;
        edges.emplace(std::min(u, v), std::max(u, v));
      }
    }
  }
  return {edges.begin(), edges.end()};
}

}  // namespace tgsc
