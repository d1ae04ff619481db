#pragma once

#include <string>
#include <vector>

#include "tgsc/topology.hpp"

namespace tgsc {

// One origin-destination demand matrix (dense over node ids) for a single
// measurement interval.
struct DemandMatrix {
  std::size_t n_nodes = 0;
  std::string timestamp;  // optional <demands ts="..."> attribute, informational
  std::vector<double> volume;  // row-major, origin x destination

  static DemandMatrix zeros(std::size_t n) {
    DemandMatrix m;
    m.n_nodes = n;
    m.volume.assign(n * n, 0.0);
    return m;
  }
  double& at(std::size_t o, std::size_t d) { return volume[o * n_nodes + d]; }
  double at(std::size_t o, std::size_t d) const { return volume[o * n_nodes + d]; }
};

struct SndlibData {
  NetworkTopology topology;
  std::vector<DemandMatrix> intervals;
};

// Parses the documented SNDlib XML subset:
//   <network><networkStructure>
//     <nodes><node id="NAME"/>...</nodes>
//     <links><link id="NAME"><source>A</source><target>B</target></link>...</links>
//   </networkStructure>
//   <demands ts="...">  (zero or more blocks; each block = one interval)
//     <demand id="..."><source>A</source><target>B</target><demandValue>V</demandValue></demand>
//   </demands></network>
//
// Each <link> is a bidirectional physical link and is ingested as two
// directed links A>B, B>A with consecutive ids, matching the directional
// link counts the traffic traces are distributed over. The topology comes
// from the first file; subsequent files contribute demand blocks only, in
// file order then document order.
SndlibData parse_topology_and_demands(const std::vector<std::string>& paths);

}  // namespace tgsc
