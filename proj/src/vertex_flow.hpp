#pragma once

#include <span>
#include <vector>

#include "stealthguard/digraph.hpp"

namespace stealthguard::detail {

struct VertexFlowResult {
  int value = 0;
  // Capacity-one vertices on the minimum cut closest to the sources, ascending.
  std::vector<int> cut;
  // `value` simple paths, each from a source to a sink, pairwise sharing only
  // vertices flagged as shared.
  std::vector<std::vector<int>> paths;
};

// Maximum number of source-to-sink paths in which every vertex not flagged in
// `shared` is used at most once. Solved as max-flow on the split graph
// (v_in -> v_out with capacity 1, or unbounded when shared) with Dinic's
// shortest-augmenting-path phases.
//
// Precondition: every source-to-sink path contains an unshared vertex, so the
// flow is finite.
VertexFlowResult vertex_disjoint_flow(const Digraph& graph,
                                      std::span<const int> sources,
                                      std::span<const int> sinks,
                                      const std::vector<bool>& shared);

}  // namespace stealthguard::detail
