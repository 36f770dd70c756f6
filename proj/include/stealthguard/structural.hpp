#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "stealthguard/digraph.hpp"
#include "stealthguard/topology.hpp"

namespace stealthguard {

/// Menger pair for a (source, sink) query: a minimum vertex separator and an
/// equally large family of vertex-disjoint paths.
struct SeparatorResult {
  /// False when source and sink are adjacent with internal_only set: no
  /// vertex set separates them.
  bool finite = true;
  int size = 0;
  /// Source-closest minimum separator, ascending vertex ids. Never contains
  /// the endpoints when internal_only is set.
  std::vector<int> witness;
  /// Each path runs source ... sink.
  std::vector<std::vector<int>> disjoint_paths;
};

/// Maximum number of source-to-sink paths sharing no vertex other than the
/// endpoints (internal_only) or sharing no vertex at all (!internal_only).
SeparatorResult max_disjoint_paths(const Digraph& graph, int source, int sink,
                                   bool internal_only = true);

/// A maximum family of fully vertex-disjoint paths from the attack inputs to
/// the observers of G^a.
struct Linking {
  int size = 0;
  std::vector<std::vector<NodeId>> paths;
};

Linking max_linking(const StructuredSystem& system);

struct LeftInvertibility {
  bool invertible = true;
  /// No attack inputs: invertible by convention.
  bool vacuous = false;
  Linking linking;
};

/// Structural left invertibility via the linking criterion: a linking that
/// covers every attack input.
LeftInvertibility analyze_left_invertibility(const StructuredSystem& system);
bool is_structurally_left_invertible(const StructuredSystem& system);

struct AgentSeparator {
  int agent = 0;
  int size = 0;
  std::vector<NodeId> witness;
  std::vector<std::vector<NodeId>> paths;
};

struct Counterexample {
  int agent = 0;
  std::vector<NodeId> separator;
  /// {agent} plus the separator: at most p nodes, and not structurally left
  /// invertible.
  AttackScenario attack;
};

struct RobustnessReport {
  bool robust = true;
  int p = 0;
  AttackClass attack_class = AttackClass::mixed;
  /// One entry per checked agent (every agent for F_xy, unobserved agents for
  /// F_x), ascending by agent.
  std::vector<AgentSeparator> separators;
  std::optional<Counterexample> counterexample;

  const AgentSeparator* separator_for(int agent) const;
};

/// Decides whether the topology stays structurally left invertible for every
/// compromised set of at most p nodes in the given class, by checking that
/// every required agent needs at least p vertices to be cut off from the
/// observer sink.
///
/// Throws Infeasible for the mixed class when m < p, InvalidInput for p < 0.
RobustnessReport certify_robustness(const DcsTopology& topology, int p,
                                    AttackClass attack_class);

nlohmann::json to_json(const Linking& linking);
nlohmann::json to_json(const RobustnessReport& report);

}  // namespace stealthguard
