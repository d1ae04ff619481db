#include "tgsc/routing.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>

#include "tgsc/errors.hpp"

namespace tgsc {

namespace {

constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct Adjacency {
  // Per node: (neighbor, link id), sorted by neighbor id so the greedy
  // walk below is lexicographic by construction.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> out;
  std::vector<std::vector<std::uint32_t>> in;  // predecessor node ids

  explicit Adjacency(const NetworkTopology& topo)
      : out(topo.node_count()), in(topo.node_count()) {
    for (std::uint32_t id = 0; id < topo.link_count(); ++id) {
      const auto& l = topo.links()[id];
      out[l.source].emplace_back(l.target, id);
      in[l.target].push_back(l.source);
    }
    for (auto& row : out) std::sort(row.begin(), row.end());
  }
};

// Hop distance from every node to `target` along directed links.
std::vector<std::uint32_t> distances_to(const Adjacency& adj, std::uint32_t target) {
  std::vector<std::uint32_t> dist(adj.out.size(), kUnreachable);
  dist[target] = 0;
  std::deque<std::uint32_t> queue{target};
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    for (const std::uint32_t u : adj.in[v]) {
      if (dist[u] == kUnreachable) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

std::vector<std::uint32_t> greedy_path(const Adjacency& adj,
                                       const std::vector<std::uint32_t>& dist_to_target,
                                       std::uint32_t source, std::uint32_t target) {
  std::vector<std::uint32_t> links;
  std::uint32_t cur = source;
  while (cur != target) {
    bool advanced = false;
    for (const auto& [next, link] : adj.out[cur]) {  // ascending node id
      if (dist_to_target[next] != kUnreachable && dist_to_target[next] + 1 == dist_to_target[cur]) {
        links.push_back(link);
        cur = next;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw ValidationError("internal routing error: dead end on shortest path");
  }
  return links;
}

}  // namespace

std::vector<std::uint32_t> shortest_path_links(const NetworkTopology& topology,
                                               std::uint32_t source, std::uint32_t target) {
  Adjacency adj(topology);
  const auto dist = distances_to(adj, target);
  if (dist[source] == kUnreachable) {
    throw ValidationError("no path from " + topology.node_name(source) + " to " +
                          topology.node_name(target));
  }
  return greedy_path(adj, dist, source, target);
}

LinkSeries route_demands(const NetworkTopology& topology, const std::vector<DemandMatrix>& demands,
                         double interval_seconds) {
  const std::size_t n_nodes = topology.node_count();
  for (const auto& m : demands) {
    if (m.n_nodes != n_nodes) {
      throw ValidationError("demand matrix size " + std::to_string(m.n_nodes) +
                            " does not match topology node count " + std::to_string(n_nodes));
    }
  }

  Adjacency adj(topology);
  std::vector<std::vector<std::uint32_t>> dist_cache(n_nodes);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> path_cache;

  LinkSeries series = LinkSeries::zeros(topology.link_names(), demands.size(), interval_seconds);
  for (std::size_t t = 0; t < demands.size(); ++t) {
    const auto& m = demands[t];
    for (std::uint32_t o = 0; o < n_nodes; ++o) {
      for (std::uint32_t d = 0; d < n_nodes; ++d) {
        const double volume = m.at(o, d);
        if (volume == 0.0 || o == d) continue;
        auto key = std::make_pair(o, d);
        auto it = path_cache.find(key);
        if (it == path_cache.end()) {
          if (dist_cache[d].empty()) dist_cache[d] = distances_to(adj, d);
          if (dist_cache[d][o] == kUnreachable) {
            throw ValidationError("no path from " + topology.node_name(o) + " to " +
                                  topology.node_name(d));
          }
          it = path_cache.emplace(key, greedy_path(adj, dist_cache[d], o, d)).first;
        }
        for (const std::uint32_t link : it->second) series.at(link, t) += volume;
      }
    }
  }
  return series;
}

}  // namespace tgsc
