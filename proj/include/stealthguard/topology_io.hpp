#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "stealthguard/topology.hpp"

namespace stealthguard {

/// A topology file: the graph plus the attack bound p from its header.
struct TopologyDocument {
  DcsTopology topology;
  int p = 0;
};

// Line format:
//
//   # comment
//   <n> <m> <p>
//   edge x<i> x<j>      link x_i -> x_j (x_j receives x_i's state)
//   sensor y<k> x<j>    observer y_k measures x_j
//
// Indices are one-based. Self-loops must be listed. The same content is
// accepted as a JSON object {"n", "m", "p", "edges": [[from, to]...],
// "sensors": [[observer, agent]...]}; input starting with '{' is read as JSON.
TopologyDocument parse_topology(std::string_view text);
TopologyDocument read_topology_file(const std::filesystem::path& path);

/// Canonical text form: header, edges in (from, to) order, sensors by observer.
std::string emit_topology(const DcsTopology& topology, int p);
nlohmann::json topology_to_json(const DcsTopology& topology, int p);
void write_topology_file(const std::filesystem::path& path,
                         const DcsTopology& topology, int p);

}  // namespace stealthguard
