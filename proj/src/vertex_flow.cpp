#include "vertex_flow.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace stealthguard::detail {
namespace {

class Dinic {
 public:
  explicit Dinic(int nodes) : head_(static_cast<std::size_t>(nodes)) {}

  int add_arc(int from, int to, int cap) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, cap});
    arcs_.push_back({from, 0});
    head_[from].push_back(id);
    head_[to].push_back(id + 1);
    return id;
  }

  int max_flow(int s, int t, int limit) {
    int flow = 0;
    while (flow < limit && build_levels(s, t)) {
      next_.assign(head_.size(), 0);
      while (int pushed = augment(s, t, limit - flow)) flow += pushed;
    }
    return flow;
  }

  // Residual reachability from s after max_flow.
  std::vector<bool> residual_reachable(int s) const {
    std::vector<bool> seen(head_.size(), false);
    std::vector<int> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int id : head_[v]) {
        const auto& a = arcs_[id];
        if (a.cap > 0 && !seen[a.to]) {
          seen[a.to] = true;
          stack.push_back(a.to);
        }
      }
    }
    return seen;
  }

  // Flow carried by forward arc `id` (the reverse arc's residual capacity).
  int flow_on(int id) const { return arcs_[id ^ 1].cap; }
  int target(int id) const { return arcs_[id].to; }
  const std::vector<int>& arcs_from(int v) const { return head_[v]; }
  std::size_t arc_count() const { return arcs_.size(); }

 private:
  struct Arc {
    int to;
    int cap;
  };

  bool build_levels(int s, int t) {
    level_.assign(head_.size(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int id : head_[v]) {
        const auto& a = arcs_[id];
        if (a.cap > 0 && level_[a.to] < 0) {
          level_[a.to] = level_[v] + 1;
          q.push(a.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  // Iterative DFS for one blocking-flow augmenting path in the level graph.
  int augment(int s, int t, int limit) {
    std::vector<int> path;  // arc ids
    int v = s;
    while (true) {
      if (v == t) {
        int bottleneck = limit;
        for (int id : path) bottleneck = std::min(bottleneck, arcs_[id].cap);
        for (int id : path) {
          arcs_[id].cap -= bottleneck;
          arcs_[id ^ 1].cap += bottleneck;
        }
        return bottleneck;
      }
      auto& it = next_[v];
      bool advanced = false;
      for (; it < head_[v].size(); ++it) {
        const int id = head_[v][it];
        const auto& a = arcs_[id];
        if (a.cap > 0 && level_[a.to] == level_[v] + 1) {
          path.push_back(id);
          v = a.to;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      if (path.empty()) return 0;
      // Dead end: retreat and skip the arc that led here.
      level_[v] = -1;
      const int back = path.back();
      path.pop_back();
      v = arcs_[back ^ 1].to;
      ++next_[v];
    }
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> head_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

}  // namespace

VertexFlowResult vertex_disjoint_flow(const Digraph& graph,
                                      std::span<const int> sources,
                                      std::span<const int> sinks,
                                      const std::vector<bool>& shared) {
  const int n = graph.vertex_count();
  if (static_cast<int>(shared.size()) != n)
    throw std::invalid_argument("shared flags must cover every vertex");
  const int unbounded = n + 1;
  const int super_source = 2 * n;
  const int super_sink = 2 * n + 1;
  auto in = [](int v) { return 2 * v; };
  auto out = [](int v) { return 2 * v + 1; };

  Dinic net(2 * n + 2);
  for (int v = 0; v < n; ++v)
    net.add_arc(in(v), out(v), shared[v] ? unbounded : 1);
  // Arcs into a source or out of a sink never help: any path using one can be
  // trimmed to start at its last source and stop at its first sink.
  std::vector<bool> is_source(static_cast<std::size_t>(n), false);
  std::vector<bool> is_sink(static_cast<std::size_t>(n), false);
  for (int s : sources) is_source[s] = true;
  for (int t : sinks) is_sink[t] = true;
  for (int v = 0; v < n; ++v) {
    if (is_sink[v]) continue;
    for (int w : graph.successors(v))
      if (v != w && !is_source[w]) net.add_arc(out(v), in(w), unbounded);
  }
  for (int s : sources) net.add_arc(super_source, in(s), unbounded);
  for (int t : sinks) net.add_arc(out(t), super_sink, unbounded);

  VertexFlowResult result;
  result.value = net.max_flow(super_source, super_sink, unbounded);
  if (result.value >= unbounded)
    throw std::logic_error("vertex flow is unbounded: a path avoids every "
                           "capacity-one vertex");

  const auto reach = net.residual_reachable(super_source);
  for (int v = 0; v < n; ++v)
    if (!shared[v] && reach[in(v)] && !reach[out(v)]) result.cut.push_back(v);

  // Flow decomposition. Unit vertex capacities keep every walk simple, and no
  // flow ever enters the super source.
  std::vector<int> used(net.arc_count(), 0);
  auto consume = [&](int node) -> int {
    for (int id : net.arcs_from(node)) {
      if (id % 2 != 0) continue;
      const int carried = net.flow_on(id) - used[id];
      if (carried > 0) {
        ++used[id];
        return net.target(id);
      }
    }
    return -1;
  };
  for (int k = 0; k < result.value; ++k) {
    std::vector<int> path;
    int node = consume(super_source);
    while (node != super_sink && node >= 0) {
      if (node < 2 * n && node % 2 == 0) path.push_back(node / 2);
      node = consume(node);
    }
    if (node < 0) throw std::logic_error("flow decomposition failed");
    result.paths.push_back(std::move(path));
  }
  return result;
}

}  // namespace stealthguard::detail
