#include "tgsc/sndlib.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "tgsc/errors.hpp"
#include "tgsc/io_util.hpp"

namespace tgsc {

namespace {

namespace pt = boost::property_tree;

const pt::ptree& require_child(const pt::ptree& tree, const std::string& key,
                               const std::string& context) {
  auto child = tree.get_child_optional(key);
  if (!child) throw ParseError(context + ": missing element <" + key + ">");
  return *child;
}

std::string require_value(const pt::ptree& tree, const std::string& key,
                          const std::string& context) {
  auto v = tree.get_optional<std::string>(key);
  if (!v || v->empty()) throw ParseError(context + ": missing element <" + key + ">");
  return *v;
}

void parse_structure(const pt::ptree& net, const std::string& path, NetworkTopology& topo) {
  const auto& structure = require_child(net, "networkStructure", path);
  const auto& nodes = require_child(structure, "nodes", path);
  for (const auto& [tag, node] : nodes) {
    if (tag != "node") continue;
    auto id = node.get_optional<std::string>("<xmlattr>.id");
    if (!id || id->empty()) throw ParseError(path + ": <node> without id attribute");
    topo.add_node(*id);
  }
  if (topo.node_count() == 0) throw ParseError(path + ": no <node> elements");

  const auto& links = require_child(structure, "links", path);
  for (const auto& [tag, link] : links) {
    if (tag != "link") continue;
    auto name = link.get_optional<std::string>("<xmlattr>.id").value_or("");
    const std::string src = require_value(link, "source", path + " <link " + name + ">");
    const std::string dst = require_value(link, "target", path + " <link " + name + ">");
    if (!topo.has_node(src)) {
      throw ValidationError(path + ": link '" + name + "' references unknown node " + src);
    }
    if (!topo.has_node(dst)) {
      throw ValidationError(path + ": link '" + name + "' references unknown node " + dst);
    }
    topo.add_link(topo.node_id(src), topo.node_id(dst));
    topo.add_link(topo.node_id(dst), topo.node_id(src));
  }
  if (topo.link_count() == 0) throw ParseError(path + ": no <link> elements");
}

void parse_demand_block(const pt::ptree& block, const std::string& path,
                        const NetworkTopology& topo, std::vector<DemandMatrix>& out) {
  DemandMatrix m = DemandMatrix::zeros(topo.node_count());
  m.timestamp = block.get_optional<std::string>("<xmlattr>.ts").value_or("");
  for (const auto& [tag, demand] : block) {
    if (tag != "demand") continue;
    auto name = demand.get_optional<std::string>("<xmlattr>.id").value_or("");
    const std::string context = path + " <demand " + name + ">";
    const std::string src = require_value(demand, "source", context);
    const std::string dst = require_value(demand, "target", context);
    const std::string value = require_value(demand, "demandValue", context);
    if (!topo.has_node(src)) {
      throw ValidationError(context + ": demand references unknown node " + src);
    }
    if (!topo.has_node(dst)) {
      throw ValidationError(context + ": demand references unknown node " + dst);
    }
    m.at(topo.node_id(src), topo.node_id(dst)) += parse_double(value, context);
  }
  out.push_back(std::move(m));
}

}  // namespace

SndlibData parse_topology_and_demands(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ParameterError("no input files given");
  SndlibData data;
  bool have_structure = false;
  for (const auto& path : paths) {
    pt::ptree doc;
    try {
      pt::read_xml(path, doc, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
      throw ParseError(path + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    const auto& net = require_child(doc, "network", path);
    if (!have_structure) {
      parse_structure(net, path, data.topology);
      have_structure = true;
    }
    for (const auto& [tag, child] : net) {
      if (tag == "demands") parse_demand_block(child, path, data.topology, data.intervals);
    }
  }
  return data;
}

}  // namespace tgsc
