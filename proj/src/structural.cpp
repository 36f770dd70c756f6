#include "stealthguard/structural.hpp"

#include <algorithm>

#include "stealthguard/error.hpp"
#include "vertex_flow.hpp"

namespace stealthguard {

SeparatorResult max_disjoint_paths(const Digraph& graph, int source, int sink,
                                   bool internal_only) {
  const int n = graph.vertex_count();
  if (source < 0 || source >= n || sink < 0 || sink >= n)
    throw InvalidInput("source or sink out of range");
  if (source == sink) throw InvalidInput("source and sink must differ");

  SeparatorResult result;
  if (internal_only && graph.has_edge(source, sink)) {
    result.finite = false;
    result.disjoint_paths.push_back({source, sink});
    return result;
  }

  std::vector<bool> shared(static_cast<std::size_t>(n), false);
  if (internal_only) shared[source] = shared[sink] = true;

  const int src[] = {source};
  const int dst[] = {sink};
  auto flow = detail::vertex_disjoint_flow(graph, src, dst, shared);
  result.size = flow.value;
  result.witness = std::move(flow.cut);
  result.disjoint_paths = std::move(flow.paths);
  return result;
}

namespace {

std::vector<NodeId> to_nodes(const LabeledGraph& g, const std::vector<int>& vs) {
  std::vector<NodeId> out;
  out.reserve(vs.size());
  for (int v : vs) out.push_back(g.nodes[v]);
  return out;
}

}  // namespace

Linking max_linking(const StructuredSystem& system) {
  const LabeledGraph g = build_attack_graph(system);
  std::vector<int> inputs, observers;
  for (int v = 0; v < g.graph.vertex_count(); ++v) {
    if (g.nodes[v].kind == NodeKind::attack_input) inputs.push_back(v);
    if (g.nodes[v].kind == NodeKind::observer) observers.push_back(v);
  }
  Linking linking;
  if (inputs.empty() || observers.empty()) return linking;

  const std::vector<bool> shared(static_cast<std::size_t>(g.graph.vertex_count()), false);
  auto flow = detail::vertex_disjoint_flow(g.graph, inputs, observers, shared);
  linking.size = flow.value;
  for (const auto& path : flow.paths) linking.paths.push_back(to_nodes(g, path));
  return linking;
}

LeftInvertibility analyze_left_invertibility(const StructuredSystem& system) {
  LeftInvertibility verdict;
  verdict.vacuous = system.attack_input_count() == 0;
  verdict.linking = max_linking(system);
  verdict.invertible = verdict.linking.size == system.attack_input_count();
  return verdict;
}

bool is_structurally_left_invertible(const StructuredSystem& system) {
  return analyze_left_invertibility(system).invertible;
}

const AgentSeparator* RobustnessReport::separator_for(int agent) const {
  for (const auto& s : separators)
    if (s.agent == agent) return &s;
  return nullptr;
}

RobustnessReport certify_robustness(const DcsTopology& topology, int p,
                                    AttackClass attack_class) {
  if (p < 0) throw InvalidInput("attack bound p must be non-negative");
  const bool mixed = attack_class == AttackClass::mixed;
  if (mixed && topology.observer_count() < p)
    throw Infeasible("m = " + std::to_string(topology.observer_count()) +
                     " < p = " + std::to_string(p) +
                     ": with attackable observers no topology is robust "
                     "(an attack on every observer plus one agent always exists)");

  RobustnessReport report;
  report.p = p;
  report.attack_class = attack_class;

  const LabeledGraph g = build_separator_graph(topology, /*collapse_observers=*/!mixed);
  const int o = *g.sink;
  for (int i = 0; i < topology.agent_count(); ++i) {
    if (!mixed && topology.is_observed(i)) continue;
    const int source = g.vertex_of(NodeId::agent(i));
    const SeparatorResult sep = max_disjoint_paths(g.graph, source, o);
    // The sink only has observer (or observed-agent) predecessors, so a checked
    // agent is never adjacent to it.
    if (!sep.finite) throw std::logic_error("checked agent adjacent to sink");
    AgentSeparator entry;
    entry.agent = i;
    entry.size = sep.size;
    entry.witness = to_nodes(g, sep.witness);
    for (const auto& path : sep.disjoint_paths) entry.paths.push_back(to_nodes(g, path));
    if (entry.size < p && !report.counterexample) {
      std::vector<NodeId> attacked = entry.witness;
      attacked.push_back(NodeId::agent(i));
      report.counterexample = Counterexample{
          i, entry.witness, AttackScenario::from_nodes(attacked, p)};
    }
    report.separators.push_back(std::move(entry));
  }
  report.robust = !report.counterexample.has_value();
  return report;
}

namespace {

nlohmann::json node_list(const std::vector<NodeId>& nodes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& id : nodes) out.push_back(to_string(id));
  return out;
}

}  // namespace

nlohmann::json to_json(const Linking& linking) {
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : linking.paths) paths.push_back(node_list(p));
  return {{"size", linking.size}, {"paths", std::move(paths)}};
}

nlohmann::json to_json(const RobustnessReport& report) {
  nlohmann::json sizes = nlohmann::json::object();
  nlohmann::json witnesses = nlohmann::json::object();
  for (const auto& s : report.separators) {
    const std::string key = to_string(NodeId::agent(s.agent));
    sizes[key] = s.size;
    witnesses[key] = node_list(s.witness);
  }
  nlohmann::json doc = {
      {"robust", report.robust},
      {"p", report.p},
      {"class", std::string(to_string(report.attack_class))},
      {"min_separator_sizes", std::move(sizes)},
      {"witness_separators", std::move(witnesses)},
      {"counterexample", nullptr},
  };
  if (report.counterexample) {
    const auto& c = *report.counterexample;
    doc["counterexample"] = {
        {"agent", to_string(NodeId::agent(c.agent))},
        {"separator", node_list(c.separator)},
        {"attack_set", node_list(c.attack.targets())},
    };
  }
  return doc;
}

}  // namespace stealthguard
