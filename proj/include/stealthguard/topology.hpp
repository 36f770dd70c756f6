#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "stealthguard/digraph.hpp"

namespace stealthguard {

enum class NodeKind { agent, observer, attack_input, sink };

/// Typed node identity. Indices are zero-based; the textual form is one-based
/// (`x1` is agent 0, `y1` is observer 0, `u1` is attack input 0, `o` the sink).
struct NodeId {
  NodeKind kind = NodeKind::agent;
  int index = 0;

  static constexpr NodeId agent(int i) { return {NodeKind::agent, i}; }
  static constexpr NodeId observer(int k) { return {NodeKind::observer, k}; }
  static constexpr NodeId attack_input(int j) { return {NodeKind::attack_input, j}; }
  static constexpr NodeId sink() { return {NodeKind::sink, 0}; }

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

std::string to_string(NodeId id);
NodeId parse_node_id(std::string_view text);

/// Communication link x_from -> x_to. It feeds coefficient a(to, from): the
/// receiver is the row of A.
struct AgentEdge {
  int from = 0;
  int to = 0;

  friend auto operator<=>(const AgentEdge&, const AgentEdge&) = default;
};

using Pattern = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Agents x_1..x_n with their communication links, plus m dedicated observers.
///
/// Invariants checked on construction: every agent carries an explicit
/// self-loop, no edge is listed twice, each observer senses exactly one agent
/// and no agent has two observers.
class DcsTopology {
 public:
  DcsTopology(int agent_count, std::vector<AgentEdge> edges,
              std::vector<int> sensed_agents);

  /// Inverse of a_pattern()/c_pattern().
  static DcsTopology from_pattern(const Pattern& a, const Pattern& c);

  int agent_count() const noexcept { return n_; }
  int observer_count() const noexcept { return static_cast<int>(sensed_.size()); }

  /// Sorted by (from, to).
  std::span<const AgentEdge> agent_edges() const noexcept { return edges_; }
  bool has_agent_edge(int from, int to) const;
  /// Agent successors including the agent itself, ascending.
  std::span<const int> agent_successors(int agent) const;

  int sensed_agent(int observer) const;
  std::optional<int> observer_of(int agent) const;
  bool is_observed(int agent) const { return observer_of(agent).has_value(); }

  /// Out-degree in G: agent successors plus the attached observer, if any.
  int out_degree(int agent) const;

  /// ||A||_0, self-loops included.
  std::size_t link_count() const noexcept { return edges_.size(); }

  /// [A](i, j) set iff x_j -> x_i is a link.
  Pattern a_pattern() const;
  /// [C](k, j) set iff observer y_k senses x_j.
  Pattern c_pattern() const;

  friend bool operator==(const DcsTopology& a, const DcsTopology& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.sensed_ == b.sensed_;
  }

 private:
  void check_agent(int agent) const;

  int n_;
  std::vector<AgentEdge> edges_;
  std::vector<std::vector<int>> successors_;
  std::vector<int> sensed_;
  std::vector<int> observer_of_;
};

/// All successors of `node` in G, including self-loops and sensing edges.
std::vector<NodeId> out_neighbors(const DcsTopology& topology, NodeId node);

/// Feasible attack class: F_x (agents only) or F_xy (agents and observers).
enum class AttackClass { state_only, mixed };

std::string_view to_string(AttackClass c);
/// Accepts "x" / "state" for F_x and "xy" / "mixed" for F_xy.
AttackClass parse_attack_class(std::string_view text);

/// A compromised set F. Attack inputs are numbered agents first, then
/// observers, each group in ascending index order.
class AttackScenario {
 public:
  AttackScenario() = default;
  AttackScenario(std::vector<int> agents, std::vector<int> observers, int p_bound);

  static AttackScenario from_nodes(std::span<const NodeId> nodes, int p_bound);

  const std::vector<int>& compromised_agents() const noexcept { return agents_; }
  const std::vector<int>& compromised_observers() const noexcept { return observers_; }
  int p_bound() const noexcept { return p_bound_; }
  int size() const noexcept {
    return static_cast<int>(agents_.size() + observers_.size());
  }
  bool empty() const noexcept { return size() == 0; }

  /// Node attacked by each attack input, in input order.
  std::vector<NodeId> targets() const;

  friend bool operator==(const AttackScenario&, const AttackScenario&) = default;

 private:
  std::vector<int> agents_;
  std::vector<int> observers_;
  int p_bound_ = 0;
};

/// Topology plus compromised set: the pattern quadruple ([A],[B],[C],[D]).
class StructuredSystem {
 public:
  StructuredSystem(DcsTopology topology, AttackScenario scenario);

  const DcsTopology& topology() const noexcept { return topology_; }
  const AttackScenario& scenario() const noexcept { return scenario_; }
  int attack_input_count() const noexcept { return scenario_.size(); }

  Pattern a_pattern() const { return topology_.a_pattern(); }
  Pattern b_pattern() const;
  Pattern c_pattern() const { return topology_.c_pattern(); }
  Pattern d_pattern() const;

 private:
  DcsTopology topology_;
  AttackScenario scenario_;
};

/// A Digraph whose vertices are tagged with their node identity.
struct LabeledGraph {
  Digraph graph;
  std::vector<NodeId> nodes;
  std::optional<int> sink;

  int add(NodeId id);
  int vertex_of(NodeId id) const;
  bool contains(NodeId id) const { return index_.count(id) != 0; }

 private:
  std::map<NodeId, int> index_;
};

/// G itself: agents first, then observers.
LabeledGraph topology_graph(const DcsTopology& topology);

/// G^a: G plus one attack-input vertex per compromised node, each with a single
/// edge to its target.
LabeledGraph build_attack_graph(const StructuredSystem& system);

/// G' for the separator criterion. Mixed class: X, Y and a sink o fed by every
/// observer. Collapsed (state-only): X and o, with each observed agent wired
/// directly to o.
LabeledGraph build_separator_graph(const DcsTopology& topology,
                                   bool collapse_observers);

}  // namespace stealthguard
