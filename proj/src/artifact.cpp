#include "tgsc/artifact.hpp"

#include <cstring>

#include "tgsc/errors.hpp"
#include "tgsc/io_util.hpp"

namespace tgsc {

namespace {
constexpr char kMagic[4] = {'T', 'G', 'S', 'C'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void CompressedArtifact::validate() const {
  if (node_owner.size() != n_nodes) throw FormatError("artifact partition size mismatch");
  if (node_codes.size() != static_cast<std::size_t>(n_nodes) * node_code_dim) {
    throw FormatError("artifact node code size mismatch");
  }
  if (hyperedge_codes.size() != static_cast<std::size_t>(n_hyperedges) * hyperedge_code_dim) {
    throw FormatError("artifact hyperedge code size mismatch");
  }
  for (const std::uint16_t w : node_owner) {
    if (w >= n_hyperedges) throw FormatError("artifact maps a node to a nonexistent hyperedge");
  }
}

CompressedArtifact make_artifact(const CodeSet<float>& codes, const TopoStructure& structure,
                                 const PipelineDims& dims, std::uint32_t window,
                                 std::uint64_t model_id, double norm_min, double norm_max) {
  CompressedArtifact a;
  a.n_nodes = structure.partition.n;
  a.window = window;
  a.n_hyperedges = static_cast<std::uint32_t>(structure.partition.hyperedges.size());
  a.p = structure.partition.p;
  a.node_code_dim = static_cast<std::uint32_t>(dims.node_code);
  a.hyperedge_code_dim = static_cast<std::uint32_t>(dims.hyperedge_code);
  a.model_id = model_id;
  a.norm_min = norm_min;
  a.norm_max = norm_max;
  a.node_owner.reserve(a.n_nodes);
  for (const std::uint32_t w : structure.owner) {
    if (w > 0xffff) throw ValidationError("hyperedge index exceeds the u16 partition encoding");
    a.node_owner.push_back(static_cast<std::uint16_t>(w));
  }
  a.node_codes.reserve(static_cast<std::size_t>(a.n_nodes) * a.node_code_dim);
  for (const auto& code : codes.node_codes) {
    a.node_codes.insert(a.node_codes.end(), code.values().begin(), code.values().end());
  }
  a.hyperedge_codes.reserve(static_cast<std::size_t>(a.n_hyperedges) * a.hyperedge_code_dim);
  for (const auto& code : codes.hyperedge_codes) {
    a.hyperedge_codes.insert(a.hyperedge_codes.end(), code.values().begin(), code.values().end());
  }
  a.validate();
  return a;
}

std::string serialize_artifact(const CompressedArtifact& a) {
  a.validate();
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  append_raw(out, kVersion);
  append_raw(out, a.n_nodes);
  append_raw(out, a.window);
  append_raw(out, a.n_hyperedges);
  append_raw(out, a.p);
  append_raw(out, a.node_code_dim);
  append_raw(out, a.hyperedge_code_dim);
  append_raw(out, a.model_id);
  append_raw(out, a.norm_min);
  append_raw(out, a.norm_max);
  for (const std::uint16_t w : a.node_owner) append_raw(out, w);
  for (const float v : a.node_codes) append_raw(out, v);
  for (const float v : a.hyperedge_codes) append_raw(out, v);
  return out;
}

CompressedArtifact deserialize_artifact(const std::string& bytes, const std::string& context) {
  std::size_t offset = 0;
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(context + ": not a TGSC artifact (bad magic)");
  }
  offset = sizeof(kMagic);
  const auto version = read_raw<std::uint16_t>(bytes, offset, "version");
  if (version != kVersion) {
    throw FormatError(context + ": unsupported artifact version " + std::to_string(version));
  }
  CompressedArtifact a;
  a.n_nodes = read_raw<std::uint32_t>(bytes, offset, "n_nodes");
  a.window = read_raw<std::uint32_t>(bytes, offset, "window");
  a.n_hyperedges = read_raw<std::uint32_t>(bytes, offset, "n_hyperedges");
  a.p = read_raw<std::uint32_t>(bytes, offset, "p");
  a.node_code_dim = read_raw<std::uint32_t>(bytes, offset, "node_code_dim");
  a.hyperedge_code_dim = read_raw<std::uint32_t>(bytes, offset, "hyperedge_code_dim");
  a.model_id = read_raw<std::uint64_t>(bytes, offset, "model_id");
  a.norm_min = read_raw<double>(bytes, offset, "norm_min");
  a.norm_max = read_raw<double>(bytes, offset, "norm_max");
  a.node_owner.resize(a.n_nodes);
  for (auto& w : a.node_owner) w = read_raw<std::uint16_t>(bytes, offset, "partition");
  a.node_codes.resize(static_cast<std::size_t>(a.n_nodes) * a.node_code_dim);
  for (auto& v : a.node_codes) v = read_raw<float>(bytes, offset, "node codes");
  a.hyperedge_codes.resize(static_cast<std::size_t>(a.n_hyperedges) * a.hyperedge_code_dim);
  for (auto& v : a.hyperedge_codes) v = read_raw<float>(bytes, offset, "hyperedge codes");
  if (offset != bytes.size()) {
    throw FormatError(context + ": trailing bytes after artifact payload");
  }
  a.validate();
  return a;
}

void save_artifact(const CompressedArtifact& artifact, const std::string& path) {
  write_file_atomic(path, serialize_artifact(artifact));
}

CompressedArtifact load_artifact(const std::string& path) {
  return deserialize_artifact(read_file(path), path);
}

}  // namespace tgsc
