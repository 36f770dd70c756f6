#include "stealthguard/synthesis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "stealthguard/error.hpp"
#include "stealthguard/structural.hpp"

namespace stealthguard {
namespace {

void check_shape(int n, int m, int p) {
  if (n < 1) throw InvalidInput("need at least one agent");
  if (m < 0 || m > n) throw InvalidInput("sensor count m must lie in [0, n]");
  if (p < 0 || p > n) throw InvalidInput("attack bound p must lie in [0, n]");
  if (p > m)
    throw Infeasible("p = " + std::to_string(p) + " exceeds m = " +
                     std::to_string(m) +
                     ": at least p dedicated sensors are required");
}

SynthesisResult finish(int n, int p, AttackClass attack_class,
                       std::vector<AgentEdge> edges, std::vector<int> sensed) {
  const int m = static_cast<int>(sensed.size());
  DcsTopology topology(n, std::move(edges), std::move(sensed));
  const bool certified = certify_robustness(topology, p, attack_class).robust;
  const std::size_t links = topology.link_count();
  return {std::move(topology), links, m, certified};
}

}  // namespace

std::size_t min_links_value(int n, int m, int p, AttackClass attack_class) {
  check_shape(n, m, p);
  if (p == 0) return static_cast<std::size_t>(n);
  if (attack_class == AttackClass::mixed)
    return static_cast<std::size_t>(n * p + n - m);
  return static_cast<std::size_t>((n - m) * p + n);
}

SynthesisResult synthesize(int n, int m, int p, AttackClass attack_class) {
  check_shape(n, m, p);
  const bool mixed = attack_class == AttackClass::mixed;
  std::vector<AgentEdge> edges;
  std::vector<int> sensed;
  for (int j = 0; j < m; ++j) {
    sensed.push_back(j);
    edges.push_back({j, j});
    if (mixed)
      for (int t = 1; t < p; ++t) edges.push_back({j, (j + t) % m});
  }
  for (int j = m; j < n; ++j) {
    edges.push_back({j, j});
    for (int t = 0; t < p; ++t) edges.push_back({j, ((j - m) * p + t) % m});
  }
  return finish(n, p, attack_class, std::move(edges), std::move(sensed));
}

SynthesisResult synthesize(const SynthesisSpec& spec) {
  int m = 0;
  if (spec.m) {
    m = *spec.m;
  } else {
    m = optimal_sensor_count(spec.n, spec.p, spec.link_cost, spec.sensor_cost,
                             spec.attack_class)
            .m;
  }
  if (spec.platoon) return synthesize_platoon(spec.n, m, spec.p, spec.attack_class);
  return synthesize(spec.n, m, spec.p, spec.attack_class);
}

SensorChoice optimal_sensor_count(int n, int p, double link_cost,
                                  double sensor_cost, AttackClass attack_class) {
  if (n < 1) throw InvalidInput("need at least one agent");
  if (p < 0 || p > n) throw InvalidInput("attack bound p must lie in [0, n]");
  if (!(link_cost > 0.0) || !(sensor_cost > 0.0) || !std::isfinite(link_cost) ||
      !std::isfinite(sensor_cost))
    throw InvalidInput("link and sensor costs must be positive and finite");

  // d(cost)/dm over m in [p, n]; with p = 0 the link count is n for every m.
  double slope = sensor_cost;
  if (p > 0)
    slope = attack_class == AttackClass::mixed ? sensor_cost - link_cost
                                               : sensor_cost - link_cost * p;
  SensorChoice choice;
  choice.m = slope < 0.0 ? n : p;
  choice.cost = link_cost * static_cast<double>(min_links_value(n, choice.m, p, attack_class)) +
                sensor_cost * choice.m;
  return choice;
}

SynthesisResult synthesize_platoon(int n, int m, int p, AttackClass attack_class) {
  check_shape(n, m, p);
  if (n - m < 1)
    throw InvalidInput("platoon synthesis needs at least one unobserved vehicle");
  const int first_observed = n - m;
  std::vector<AgentEdge> edges;
  for (int i = 0; i < first_observed; ++i)
    for (int k = 0; k <= p; ++k) edges.push_back({i, i + k});
  for (int q = 0; q < m; ++q) {
    const int agent = first_observed + q;
    edges.push_back({agent, agent});
    if (attack_class == AttackClass::mixed)
      for (int t = 1; t < p; ++t) edges.push_back({agent, first_observed + (q + t) % m});
  }
  std::vector<int> sensed;
  for (int q = 0; q < m; ++q) sensed.push_back(first_observed + q);
  return finish(n, p, attack_class, std::move(edges), std::move(sensed));
}

bool lower_bound_check(const DcsTopology& topology, int p, AttackClass attack_class) {
  for (int i = 0; i < topology.agent_count(); ++i) {
    if (attack_class == AttackClass::mixed) {
      if (topology.out_degree(i) < p + 1) return false;
    } else if (!topology.is_observed(i)) {
      if (static_cast<int>(topology.agent_successors(i).size()) - 1 < p) return false;
    }
  }
  return true;
}

}  // namespace stealthguard
