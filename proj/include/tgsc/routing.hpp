#pragma once

#include <vector>

#include "tgsc/series.hpp"
#include "tgsc/sndlib.hpp"
#include "tgsc/topology.hpp"

namespace tgsc {

// Routes every demand over its single shortest path (hop count; ties broken
// by the lexicographically smallest node-id sequence) and accumulates the
// per-link load per interval. Disconnected OD pairs with nonzero volume are
// a validation error naming the pair.
LinkSeries route_demands(const NetworkTopology& topology, const std::vector<DemandMatrix>& demands,
                         double interval_seconds = 300.0);

// Shortest path from source to target as a sequence of link ids; the
// deterministic tie-break picks, at every hop, the smallest next node id
// among those that stay on a shortest path.
std::vector<std::uint32_t> shortest_path_links(const NetworkTopology& topology,
                                               std::uint32_t source, std::uint32_t target);

}  // namespace tgsc
