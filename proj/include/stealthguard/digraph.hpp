#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stealthguard {

/// Simple directed graph over dense vertex ids 0..vertex_count()-1.
///
/// Parallel edges are never stored; self-loops are allowed. Each vertex carries
/// a display label used in reports.
class Digraph {
 public:
  using Vertex = int;

  Digraph() = default;
  explicit Digraph(int vertex_count);

  Vertex add_vertex(std::string label = {});

  /// Returns false (and leaves the graph unchanged) if the edge already exists.
  bool add_edge(Vertex from, Vertex to);
  bool has_edge(Vertex from, Vertex to) const;

  int vertex_count() const noexcept { return static_cast<int>(out_.size()); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::span<const Vertex> successors(Vertex v) const;
  int out_degree(Vertex v) const { return static_cast<int>(successors(v).size()); }

  const std::string& label(Vertex v) const;
  void set_label(Vertex v, std::string label);

  /// Vertices reachable from `source` (including itself), skipping any vertex
  /// flagged in `removed`. `removed` may be empty.
  std::vector<bool> reachable_from(Vertex source,
                                   std::span<const bool> removed = {}) const;

 private:
  void check(Vertex v) const;

  std::vector<std::vector<Vertex>> out_;
  std::vector<std::string> labels_;
  std::size_t edge_count_ = 0;
};

}  // namespace stealthguard
