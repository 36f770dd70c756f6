#pragma once

#include <cstddef>
#include <optional>

#include "stealthguard/topology.hpp"

namespace stealthguard {

struct SynthesisSpec {
  int n = 0;
  /// Sensor count; empty means "choose m to minimize link_cost * ||A||_0 +
  /// sensor_cost * m".
  std::optional<int> m;
  int p = 0;
  AttackClass attack_class = AttackClass::mixed;
  double link_cost = 1.0;
  double sensor_cost = 1.0;
  /// Restrict to the platoon family (vehicles in a line, forward links only).
  bool platoon = false;
};

struct SynthesisResult {
  DcsTopology topology;
  std::size_t link_count = 0;
  int chosen_m = 0;
  bool certified = false;
};

/// Fewest links (self-loops included) of any topology with n agents and m
/// dedicated sensors that is robust to every compromised set of size <= p:
/// np + n - m when observers are attackable, (n - m)p + n for agent-only
/// attacks. With p = 0 the mandatory self-loops give n in both classes.
///
/// Throws InvalidInput on out-of-range arguments and Infeasible when p > m.
std::size_t min_links_value(int n, int m, int p, AttackClass attack_class);

/// Minimum-link robust topology with observers on x_1..x_m. Each observed agent
/// links to itself and, for attackable observers, to the p-1 observed agents
/// that follow it cyclically; unobserved agents link to themselves and to p
/// observed agents assigned round-robin.
SynthesisResult synthesize(int n, int m, int p, AttackClass attack_class);

/// Dispatches on the spec: free m goes through optimal_sensor_count, platoon
/// goes through synthesize_platoon.
SynthesisResult synthesize(const SynthesisSpec& spec);

struct SensorChoice {
  int m = 0;
  double cost = 0.0;
};

/// Cost-optimal sensor count for Problem-2 style trade-offs. The total cost
/// is affine in m, so the optimum is an end point: m = p or m = n. Ties pick
/// m = p.
SensorChoice optimal_sensor_count(int n, int p, double link_cost,
                                  double sensor_cost, AttackClass attack_class);

/// Platoon topology: agents in a line, observers y_1..y_m on the last m agents.
/// Agent-only attacks: x_i links forward to x_{i+1..i+p} for unobserved i.
/// Attackable observers: the same forward links, plus each observed agent
/// links to the next p-1 observed agents cyclically.
SynthesisResult synthesize_platoon(int n, int m, int p, AttackClass attack_class);

/// Necessary degree condition. Mixed class: every agent has out-degree (self
/// and sensor included) >= p + 1. Agent-only class: every unobserved agent
/// has at least p successors besides itself.
bool lower_bound_check(const DcsTopology& topology, int p, AttackClass attack_class);

}  // namespace stealthguard
