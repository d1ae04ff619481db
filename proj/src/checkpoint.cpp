#include "tgsc/checkpoint.hpp"

#include <cstring>

#include <nlohmann/json.hpp>

#include "tgsc/errors.hpp"
#include "tgsc/io_util.hpp"

namespace tgsc {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr char kMagic[] = "TGSC-MODEL";  // 10 bytes, no terminator on disk
constexpr std::size_t kMagicLen = 10;
constexpr std::uint16_t kVersion = 1;

ordered_json config_to_json(const TrainConfig& cfg) {
  ordered_json j;
  j["model"] = model_kind_name(cfg.kind);
  j["target_rc"] = cfg.target_rc.str();
  j["p"] = cfg.p;
  j["hidden"] = cfg.hidden;
  j["node_code"] = cfg.node_code;
  j["hyperedge_code"] = cfg.hyperedge_code;
  j["rounds"] = cfg.rounds;
  j["edge_fanout"] = cfg.edge_fanout;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["epsilon"] = cfg.epsilon;
  j["seed"] = cfg.seed;
  return j;
}

Ratio ratio_from_string(const std::string& s) {
  const auto pos = s.find('/');
  if (pos == std::string::npos) throw FormatError("malformed ratio: " + s);
  return Ratio(std::stoll(s.substr(0, pos)), std::stoll(s.substr(pos + 1)));
}

TrainConfig config_from_json(const ordered_json& j) {
  TrainConfig cfg;
  cfg.kind = model_kind_from_name(j.at("model").get<std::string>());
  cfg.target_rc = ratio_from_string(j.at("target_rc").get<std::string>());
  cfg.p = j.at("p").get<std::uint32_t>();
  cfg.hidden = j.at("hidden").get<std::uint32_t>();
  cfg.node_code = j.at("node_code").get<std::uint32_t>();
  cfg.hyperedge_code = j.at("hyperedge_code").get<std::uint32_t>();
  cfg.rounds = j.at("rounds").get<std::uint32_t>();
  cfg.edge_fanout = j.at("edge_fanout").get<std::uint32_t>();
  cfg.epochs = j.at("epochs").get<std::uint32_t>();
  cfg.batch_size = j.at("batch_size").get<std::uint32_t>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.epsilon = j.at("epsilon").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  ordered_json header;
  header["format"] = "tgsc-model";
  header["config"] = config_to_json(ckpt.config);
  header["n_links"] = ckpt.n_links;
  header["window"] = ckpt.window;
  ordered_json tensors = ordered_json::array();
  for (const auto& [name, var] : ckpt.params) {
    tensors.push_back({{"name", name}, {"shape", var.tensor().shape}});
  }
  header["tensors"] = std::move(tensors);
  const std::string header_text = header.dump();

  std::string out;
  out.append(kMagic, kMagicLen);
  append_raw(out, kVersion);
  append_raw(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  for (const auto& [name, var] : ckpt.params) {
    for (const float v : var.values()) append_raw(out, v);
  }
  append_raw(out, fnv1a(out.data(), out.size()));
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes, const std::string& context) {
  if (bytes.size() < kMagicLen + sizeof(std::uint16_t) + sizeof(std::uint32_t) + sizeof(std::uint64_t)) {
    throw FormatError(context + ": truncated checkpoint");
  }
  if (std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw FormatError(context + ": not a TGSC model checkpoint (bad magic)");
  }
  std::size_t offset = kMagicLen;
  const auto version = read_raw<std::uint16_t>(bytes, offset, "version");
  if (version != kVersion) {
    throw FormatError(context + ": unsupported checkpoint version " + std::to_string(version));
  }

  const std::uint64_t stored_digest =
      fnv1a(bytes.data(), bytes.size() - sizeof(std::uint64_t));
  std::size_t tail = bytes.size() - sizeof(std::uint64_t);
  if (read_raw<std::uint64_t>(bytes, tail, "digest") != stored_digest) {
    throw FormatError(context + ": checkpoint digest mismatch (corrupted file)");
  }

  const auto header_len = read_raw<std::uint32_t>(bytes, offset, "header length");
  if (offset + header_len > bytes.size()) throw FormatError(context + ": truncated header");
  ordered_json header;
  try {
    header = ordered_json::parse(bytes.substr(offset, header_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(context + ": bad checkpoint header: " + e.what());
  }
  offset += header_len;

  Checkpoint ckpt;
  ckpt.config = config_from_json(header.at("config"));
  ckpt.n_links = header.at("n_links").get<std::uint32_t>();
  ckpt.window = header.at("window").get<std::uint32_t>();
  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
    Tensor t = Tensor::zeros(shape);
    const std::size_t nbytes = t.values.size() * sizeof(float);
    if (offset + nbytes > bytes.size() - sizeof(std::uint64_t)) {
      throw FormatError(context + ": truncated tensor payload at " + name);
    }
    std::memcpy(t.values.data(), bytes.data() + offset, nbytes);
    offset += nbytes;
    ckpt.params.add(name, std::move(t));
  }
  if (offset != bytes.size() - sizeof(std::uint64_t)) {
    throw FormatError(context + ": trailing bytes after tensor payload");
  }
  ckpt.model_id = stored_digest;
  return ckpt;
}

std::uint64_t save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  write_file_atomic(path, bytes);
  return fnv1a(bytes.data(), bytes.size() - sizeof(std::uint64_t));
}

Checkpoint load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(read_file(path), path);
}

}  // namespace tgsc
