#include "stealthguard/topology.hpp"

#include <algorithm>
#include <charconv>

#include "stealthguard/error.hpp"

namespace stealthguard {

std::string to_string(NodeId id) {
  switch (id.kind) {
    case NodeKind::agent:
      return "x" + std::to_string(id.index + 1);
    case NodeKind::observer:
      return "y" + std::to_string(id.index + 1);
    case NodeKind::attack_input:
      return "u" + std::to_string(id.index + 1);
    case NodeKind::sink:
      return "o";
  }
  return "?";
}

NodeId parse_node_id(std::string_view text) {
  if (text == "o") return NodeId::sink();
  if (text.size() < 2) throw InvalidInput("bad node id '" + std::string(text) + "'");
  NodeKind kind;
  switch (text.front()) {
    case 'x': kind = NodeKind::agent; break;
    case 'y': kind = NodeKind::observer; break;
    case 'u': kind = NodeKind::attack_input; break;
    default:
      throw InvalidInput("bad node id '" + std::string(text) + "'");
  }
  int one_based = 0;
  const char* first = text.data() + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, one_based);
  if (ec != std::errc{} || ptr != last || one_based < 1)
    throw InvalidInput("bad node id '" + std::string(text) + "'");
  return {kind, one_based - 1};
}

DcsTopology::DcsTopology(int agent_count, std::vector<AgentEdge> edges,
                         std::vector<int> sensed_agents)
    : n_(agent_count), edges_(std::move(edges)), sensed_(std::move(sensed_agents)) {
  if (n_ < 0) throw InvalidInput("negative agent count");
  if (observer_count() > n_)
    throw InvalidInput("more observers (" + std::to_string(observer_count()) +
                       ") than agents (" + std::to_string(n_) + ")");
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_)
      throw InvalidInput("edge endpoint out of range");
    if (i > 0 && edges_[i - 1] == e)
      throw InvalidInput("duplicate edge " + to_string(NodeId::agent(e.from)) +
                         " -> " + to_string(NodeId::agent(e.to)));
  }
  successors_.assign(static_cast<std::size_t>(n_), {});
  for (const auto& e : edges_) successors_[e.from].push_back(e.to);
  for (int i = 0; i < n_; ++i) {
    if (!std::binary_search(successors_[i].begin(), successors_[i].end(), i))
      throw InvalidInput("agent " + to_string(NodeId::agent(i)) +
                         " is missing its self-loop");
  }
  observer_of_.assign(static_cast<std::size_t>(n_), -1);
  for (int k = 0; k < observer_count(); ++k) {
    const int j = sensed_[k];
    if (j < 0 || j >= n_)
      throw InvalidInput("observer " + to_string(NodeId::observer(k)) +
                         " senses an agent out of range");
    if (observer_of_[j] != -1)
      throw InvalidInput("agent " + to_string(NodeId::agent(j)) +
                         " has two observers");
    observer_of_[j] = k;
  }
}

DcsTopology DcsTopology::from_pattern(const Pattern& a, const Pattern& c) {
  if (a.rows() != a.cols()) throw InvalidInput("[A] must be square");
  if (c.rows() > 0 && c.cols() != a.cols())
    throw InvalidInput("[C] column count must match [A]");
  const int n = static_cast<int>(a.rows());
  std::vector<AgentEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a(i, j)) edges.push_back({j, i});
  std::vector<int> sensed;
  for (int k = 0; k < c.rows(); ++k) {
    int target = -1;
    for (int j = 0; j < n; ++j) {
      if (!c(k, j)) continue;
      if (target != -1)
        throw InvalidInput("observer " + to_string(NodeId::observer(k)) +
                           " senses more than one agent");
      target = j;
    }
    if (target == -1)
      throw InvalidInput("observer " + to_string(NodeId::observer(k)) +
                         " senses no agent");
    sensed.push_back(target);
  }
  return DcsTopology(n, std::move(edges), std::move(sensed));
}

void DcsTopology::check_agent(int agent) const {
  if (agent < 0 || agent >= n_)
    throw InvalidInput("unknown agent index " + std::to_string(agent));
}

bool DcsTopology::has_agent_edge(int from, int to) const {
  check_agent(from);
  check_agent(to);
  const auto& s = successors_[from];
  return std::binary_search(s.begin(), s.end(), to);
}

std::span<const int> DcsTopology::agent_successors(int agent) const {
  check_agent(agent);
  return successors_[agent];
}

int DcsTopology::sensed_agent(int observer) const {
  if (observer < 0 || observer >= observer_count())
    throw InvalidInput("unknown observer index " + std::to_string(observer));
  return sensed_[observer];
}

std::optional<int> DcsTopology::observer_of(int agent) const {
  check_agent(agent);
  const int k = observer_of_[agent];
  if (k < 0) return std::nullopt;
  return k;
}

int DcsTopology::out_degree(int agent) const {
  return static_cast<int>(agent_successors(agent).size()) +
         (is_observed(agent) ? 1 : 0);
}

Pattern DcsTopology::a_pattern() const {
  Pattern a = Pattern::Constant(n_, n_, false);
  for (const auto& e : edges_) a(e.to, e.from) = true;
  return a;
}

Pattern DcsTopology::c_pattern() const {
  Pattern c = Pattern::Constant(observer_count(), n_, false);
  for (int k = 0; k < observer_count(); ++k) c(k, sensed_[k]) = true;
  return c;
}

std::vector<NodeId> out_neighbors(const DcsTopology& topology, NodeId node) {
  std::vector<NodeId> result;
  switch (node.kind) {
    case NodeKind::agent: {
      for (int j : topology.agent_successors(node.index))
        result.push_back(NodeId::agent(j));
      if (auto k = topology.observer_of(node.index))
        result.push_back(NodeId::observer(*k));
      break;
    }
    case NodeKind::observer:
      // Observers are sinks in G; validate the id.
      topology.sensed_agent(node.index);
      break;
    default:
      throw InvalidInput("node " + to_string(node) + " is not part of G");
  }
  return result;
}

std::string_view to_string(AttackClass c) {
  return c == AttackClass::mixed ? "xy" : "x";
}

AttackClass parse_attack_class(std::string_view text) {
  if (text == "x" || text == "state") return AttackClass::state_only;
  if (text == "xy" || text == "mixed") return AttackClass::mixed;
  throw InvalidInput("unknown attack class '" + std::string(text) +
                     "' (expected x or xy)");
}

namespace {

std::vector<int> normalized(std::vector<int> v, const char* what) {
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw InvalidInput(std::string("repeated compromised ") + what);
  if (!v.empty() && v.front() < 0)
    throw InvalidInput(std::string("negative compromised ") + what + " index");
  return v;
}

}  // namespace

AttackScenario::AttackScenario(std::vector<int> agents, std::vector<int> observers,
                               int p_bound)
    : agents_(normalized(std::move(agents), "agent")),
      observers_(normalized(std::move(observers), "observer")),
      p_bound_(p_bound) {
  if (p_bound_ < 0) throw InvalidInput("negative attack bound p");
  if (size() > p_bound_)
    throw InvalidInput("compromised set has " + std::to_string(size()) +
                       " nodes but p = " + std::to_string(p_bound_));
}

AttackScenario AttackScenario::from_nodes(std::span<const NodeId> nodes,
                                          int p_bound) {
  std::vector<int> agents, observers;
  for (const auto& id : nodes) {
    if (id.kind == NodeKind::agent)
      agents.push_back(id.index);
    else if (id.kind == NodeKind::observer)
      observers.push_back(id.index);
    else
      throw InvalidInput("only agents and observers can be compromised, got " +
                         to_string(id));
  }
  return AttackScenario(std::move(agents), std::move(observers), p_bound);
}

std::vector<NodeId> AttackScenario::targets() const {
  std::vector<NodeId> t;
  t.reserve(static_cast<std::size_t>(size()));
  for (int i : agents_) t.push_back(NodeId::agent(i));
  for (int k : observers_) t.push_back(NodeId::observer(k));
  return t;
}

StructuredSystem::StructuredSystem(DcsTopology topology, AttackScenario scenario)
    : topology_(std::move(topology)), scenario_(std::move(scenario)) {
  for (int i : scenario_.compromised_agents())
    if (i >= topology_.agent_count())
      throw InvalidInput("compromised agent " + to_string(NodeId::agent(i)) +
                         " does not exist");
  for (int k : scenario_.compromised_observers())
    if (k >= topology_.observer_count())
      throw InvalidInput("compromised observer " + to_string(NodeId::observer(k)) +
                         " does not exist");
}

Pattern StructuredSystem::b_pattern() const {
  Pattern b = Pattern::Constant(topology_.agent_count(), attack_input_count(), false);
  const auto& agents = scenario_.compromised_agents();
  for (std::size_t j = 0; j < agents.size(); ++j)
    b(agents[j], static_cast<Eigen::Index>(j)) = true;
  return b;
}

Pattern StructuredSystem::d_pattern() const {
  Pattern d = Pattern::Constant(topology_.observer_count(), attack_input_count(), false);
  const auto offset = static_cast<Eigen::Index>(scenario_.compromised_agents().size());
  const auto& observers = scenario_.compromised_observers();
  for (std::size_t j = 0; j < observers.size(); ++j)
    d(observers[j], offset + static_cast<Eigen::Index>(j)) = true;
  return d;
}

int LabeledGraph::add(NodeId id) {
  if (contains(id)) throw InvalidInput("duplicate vertex " + to_string(id));
  const int v = graph.add_vertex(to_string(id));
  nodes.push_back(id);
  index_.emplace(id, v);
  return v;
}

int LabeledGraph::vertex_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw InvalidInput("node " + to_string(id) + " is not in the graph");
  return it->second;
}

LabeledGraph topology_graph(const DcsTopology& topology) {
  LabeledGraph g;
  for (int i = 0; i < topology.agent_count(); ++i) g.add(NodeId::agent(i));
  for (int k = 0; k < topology.observer_count(); ++k) g.add(NodeId::observer(k));
  for (const auto& e : topology.agent_edges()) g.graph.add_edge(e.from, e.to);
  const int n = topology.agent_count();
  for (int k = 0; k < topology.observer_count(); ++k)
    g.graph.add_edge(topology.sensed_agent(k), n + k);
  return g;
}

LabeledGraph build_attack_graph(const StructuredSystem& system) {
  LabeledGraph g = topology_graph(system.topology());
  const auto targets = system.scenario().targets();
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const int u = g.add(NodeId::attack_input(static_cast<int>(j)));
    g.graph.add_edge(u, g.vertex_of(targets[j]));
  }
  return g;
}

LabeledGraph build_separator_graph(const DcsTopology& topology,
                                   bool collapse_observers) {
  if (!collapse_observers) {
    LabeledGraph g = topology_graph(topology);
    const int o = g.add(NodeId::sink());
    for (int k = 0; k < topology.observer_count(); ++k)
      g.graph.add_edge(g.vertex_of(NodeId::observer(k)), o);
    g.sink = o;
    return g;
  }
  LabeledGraph g;
  for (int i = 0; i < topology.agent_count(); ++i) g.add(NodeId::agent(i));
  for (const auto& e : topology.agent_edges()) g.graph.add_edge(e.from, e.to);
  const int o = g.add(NodeId::sink());
  for (int k = 0; k < topology.observer_count(); ++k)
    g.graph.add_edge(topology.sensed_agent(k), o);
  g.sink = o;
  return g;
}

}  // namespace stealthguard
