#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tgsc/errors.hpp"

namespace tgsc {

// Directed network topology. Link ids are dense (0..N-1) in insertion
// order; node ids follow insertion order as well and double as the
// tie-break order for routing.
class NetworkTopology {
 public:
  struct Link {
    std::uint32_t source;
    std::uint32_t target;
    std::string name;
  };

  std::uint32_t add_node(const std::string& name) {
    auto it = node_ids_.find(name);
    if (it != node_ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(node_names_.size());
    node_names_.push_back(name);
    node_ids_.emplace(name, id);
    return id;
  }

  std::uint32_t node_id(const std::string& name) const {
    auto it = node_ids_.find(name);
    if (it == node_ids_.end()) throw ValidationError("unknown node: " + name);
    return it->second;
  }

  bool has_node(const std::string& name) const { return node_ids_.count(name) != 0; }

  std::uint32_t add_link(std::uint32_t source, std::uint32_t target, std::string name = {}) {
    if (source == target) {
      throw ValidationError("self-loop link at node " + node_names_.at(source));
    }
    if (source >= node_names_.size() || target >= node_names_.size()) {
      throw ValidationError("link endpoint out of range");
    }
    for (const auto& l : links_) {
      if (l.source == source && l.target == target) {
        throw ValidationError("duplicate link " + node_names_[source] + " -> " +
                              node_names_[target]);
      }
    }
    if (name.empty()) name = node_names_[source] + ">" + node_names_[target];
    links_.push_back(Link{source, target, std::move(name)});
    return static_cast<std::uint32_t>(links_.size() - 1);
  }

  std::size_t node_count() const { return node_names_.size(); }
  std::size_t link_count() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<std::string>& node_names() const { return node_names_; }
  const std::string& node_name(std::uint32_t id) const { return node_names_.at(id); }

  std::vector<std::string> link_names() const {
    std::vector<std::string> names;
    names.reserve(links_.size());
    for (const auto& l : links_) names.push_back(l.name);
    return names;
  }

 private:
  std::vector<std::string> node_names_;
  std::map<std::string, std::uint32_t> node_ids_;
  std::vector<Link> links_;
};

}  // namespace tgsc
