#include "stealthguard/digraph.hpp"

#include <algorithm>
#include <stdexcept>

namespace stealthguard {

Digraph::Digraph(int vertex_count) {
  if (vertex_count < 0) throw std::invalid_argument("negative vertex count");
  out_.resize(static_cast<std::size_t>(vertex_count));
  labels_.resize(static_cast<std::size_t>(vertex_count));
  for (int v = 0; v < vertex_count; ++v) labels_[v] = std::to_string(v);
}

Digraph::Vertex Digraph::add_vertex(std::string label) {
  const Vertex v = vertex_count();
  out_.emplace_back();
  labels_.push_back(label.empty() ? std::to_string(v) : std::move(label));
  return v;
}

void Digraph::check(Vertex v) const {
  if (v < 0 || v >= vertex_count())
    throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
}

bool Digraph::add_edge(Vertex from, Vertex to) {
  check(from);
  check(to);
  if (has_edge(from, to)) return false;
  out_[from].push_back(to);
  ++edge_count_;
  return true;
}

bool Digraph::has_edge(Vertex from, Vertex to) const {
  check(from);
  const auto& succ = out_[from];
  return std::find(succ.begin(), succ.end(), to) != succ.end();
}

std::span<const Digraph::Vertex> Digraph::successors(Vertex v) const {
  check(v);
  return out_[v];
}

const std::string& Digraph::label(Vertex v) const {
  check(v);
  return labels_[v];
}

void Digraph::set_label(Vertex v, std::string label) {
  check(v);
  labels_[v] = std::move(label);
}

std::vector<bool> Digraph::reachable_from(Vertex source,
                                          std::span<const bool> removed) const {
  check(source);
  std::vector<bool> seen(out_.size(), false);
  auto blocked = [&](Vertex v) {
    return !removed.empty() && removed[static_cast<std::size_t>(v)];
  };
  if (blocked(source)) return seen;
  std::vector<Vertex> stack{source};
  seen[source] = true;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : out_[v]) {
      if (seen[w] || blocked(w)) continue;
      seen[w] = true;
      stack.push_back(w);
    }
  }
  return seen;
}

}  // namespace stealthguard
