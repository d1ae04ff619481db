#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgsc/pipelines.hpp"
#include "tgsc/rational.hpp"

namespace tgsc {

// The stored unit of compression for one subsignal: per-node codes,
// per-hyperedge codes, the node->hyperedge map, and enough metadata to
// decode without any side channel.
//
// Binary layout (little-endian): magic "TGSC", u16 version, metadata block
// (N, d, K, p, d_V^c, d_W^c as u32; model id hash u64; normalization
// min/max as f64), partition as N u16 hyperedge indices, node codes
// (N x d_V^c f32, row-major), hyperedge codes (K x d_W^c f32, row-major).
struct CompressedArtifact {
  std::uint32_t n_nodes = 0;
  std::uint32_t window = 0;
  std::uint32_t n_hyperedges = 0;
  std::uint32_t p = 0;
  std::uint32_t node_code_dim = 0;
  std::uint32_t hyperedge_code_dim = 0;
  std::uint64_t model_id = 0;
  double norm_min = 0.0;
  double norm_max = 0.0;
  std::vector<std::uint16_t> node_owner;     // N entries
  std::vector<float> node_codes;             // N x d_V^c
  std::vector<float> hyperedge_codes;        // K x d_W^c

  std::size_t stored_float_count() const { return node_codes.size() + hyperedge_codes.size(); }

  Ratio achieved_ratio() const {
    return compression_ratio(n_nodes, window, n_hyperedges, node_code_dim, hyperedge_code_dim);
  }

  void validate() const;
};

CompressedArtifact make_artifact(const CodeSet<float>& codes, const TopoStructure& structure,
                                 const PipelineDims& dims, std::uint32_t window,
                                 std::uint64_t model_id, double norm_min, double norm_max);

std::string serialize_artifact(const CompressedArtifact& artifact);
CompressedArtifact deserialize_artifact(const std::string& bytes, const std::string& context);

void save_artifact(const CompressedArtifact& artifact, const std::string& path);
CompressedArtifact load_artifact(const std::string& path);

}  // namespace tgsc
