#include "stealthguard/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "stealthguard/error.hpp"
#include "stealthguard/numeric.hpp"
#include "stealthguard/structural.hpp"
#include "stealthguard/synthesis.hpp"
#include "stealthguard/topology_io.hpp"

namespace stealthguard {
namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string topology_path;
  std::string out_path;
  std::string attack;
  std::optional<int> n, m, p;
  std::string attack_class = "xy";
  double k1 = 1.0, k2 = 1.0;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::optional<double> eta;
  double rho = 0.9;
  double process_noise = 1.0;
  double measurement_noise = 0.0;
  double attack_magnitude = 1.0;
  std::string realization_in, realization_out;
  bool as_json = false;
};

std::uint64_t effective_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("STEALTHGUARD_SEED")) {
    try {
      std::size_t used = 0;
      const std::string text(env);
      const auto value = std::stoull(text, &used);
      if (used == text.size()) return value;
    } catch (const std::logic_error&) {
    }
    throw InvalidInput("STEALTHGUARD_SEED must be an unsigned integer");
  }
  return kDefaultSeed;
}

std::vector<NodeId> parse_node_list(const std::string& text) {
  std::vector<NodeId> nodes;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(' ');
    nodes.push_back(parse_node_id(item.substr(first, last - first + 1)));
  }
  return nodes;
}

std::string join(const std::vector<NodeId>& nodes, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) s += sep;
    s += to_string(nodes[i]);
  }
  return s;
}

json node_array(const std::vector<NodeId>& nodes) {
  json a = json::array();
  for (const auto& id : nodes) a.push_back(to_string(id));
  return a;
}

int require(const std::optional<int>& v, const char* flag) {
  if (!v) throw InvalidInput(std::string("missing required option ") + flag);
  return *v;
}

StructuredSystem load_system(const RunConfig& cfg, const TopologyDocument& doc,
                             std::vector<std::string>& warnings) {
  const auto nodes = parse_node_list(cfg.attack);
  int bound = std::max(doc.p, static_cast<int>(nodes.size()));
  if (cfg.p) {
    bound = *cfg.p;
  } else if (static_cast<int>(nodes.size()) > doc.p) {
    warnings.push_back("attack set has " + std::to_string(nodes.size()) +
                       " nodes, more than the file's p = " + std::to_string(doc.p));
  }
  return StructuredSystem(doc.topology, AttackScenario::from_nodes(nodes, bound));
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const TopologyDocument doc = read_topology_file(cfg.topology_path);
  std::vector<std::string> warnings;
  const StructuredSystem sys = load_system(cfg, doc, warnings);
  const LeftInvertibility verdict = analyze_left_invertibility(sys);
  if (verdict.vacuous)
    warnings.push_back("empty attack set: left invertible by convention");
  if (sys.attack_input_count() > doc.topology.observer_count())
    warnings.push_back("more attack inputs than observers: no linking can cover them");

  if (cfg.as_json) {
    json doc_out = {
        {"command", "analyze"},
        {"attack_set", node_array(sys.scenario().targets())},
        {"inputs", sys.attack_input_count()},
        {"linking", to_json(verdict.linking)},
        {"left_invertible", verdict.invertible},
        {"vacuous", verdict.vacuous},
        {"warnings", warnings},
    };
    out << doc_out.dump(2) << '\n';
  } else {
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    out << "attack set: " << (sys.scenario().empty() ? "(empty)" : join(sys.scenario().targets()))
        << '\n';
    out << "linking size: " << verdict.linking.size << " of "
        << sys.attack_input_count() << '\n';
    for (const auto& path : verdict.linking.paths) out << "  path: " << join(path) << '\n';
    out << "structurally left invertible: " << (verdict.invertible ? "yes" : "no") << '\n';
  }
  return verdict.invertible ? kExitSuccess : kExitNegative;
}

// ---------------------------------------------------------------- certify

void print_report(const RobustnessReport& report, const DcsTopology& topology,
                  std::ostream& out) {
  out << "class: " << to_string(report.attack_class) << "  p: " << report.p << '\n';
  for (const auto& s : report.separators) {
    out << "  " << to_string(NodeId::agent(s.agent)) << ": min separator " << s.size
        << " {" << join(s.witness, ", ") << "}\n";
  }
  out << "degree lower bound: "
      << (lower_bound_check(topology, report.p, report.attack_class) ? "met" : "violated")
      << '\n';
  if (report.counterexample) {
    const auto& c = *report.counterexample;
    out << "counterexample: " << to_string(NodeId::agent(c.agent))
        << " is separated from the observers by {" << join(c.separator, ", ") << "}\n";
    out << "induced attack set: {" << join(c.attack.targets(), ", ") << "}\n";
  }
  out << "robust: " << (report.robust ? "yes" : "no") << '\n';
}

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
  const TopologyDocument doc = read_topology_file(cfg.topology_path);
  const int p = cfg.p.value_or(doc.p);
  const RobustnessReport report =
      certify_robustness(doc.topology, p, parse_attack_class(cfg.attack_class));
  if (cfg.as_json) {
    json j = to_json(report);
    j["command"] = "certify";
    j["degree_lower_bound"] = lower_bound_check(doc.topology, p, report.attack_class);
    out << j.dump(2) << '\n';
  } else {
    print_report(report, doc.topology, out);
  }
  return report.robust ? kExitSuccess : kExitNegative;
}

// ------------------------------------------------------- synthesize/platoon

int emit_synthesis(const RunConfig& cfg, const SynthesisResult& result, int p,
                   AttackClass attack_class, const char* command,
                   std::ostream& out) {
  const int n = result.topology.agent_count();
  const std::size_t formula = min_links_value(n, result.chosen_m, p, attack_class);
  bool recertified = result.certified;
  if (!cfg.out_path.empty()) {
    write_topology_file(cfg.out_path, result.topology, p);
    const TopologyDocument reloaded = read_topology_file(cfg.out_path);
    recertified = reloaded.topology == result.topology &&
                  certify_robustness(reloaded.topology, p, attack_class).robust;
  }
  if (cfg.as_json) {
    json j = {
        {"command", command},
        {"n", n},
        {"m", result.chosen_m},
        {"p", p},
        {"class", std::string(to_string(attack_class))},
        {"link_count", result.link_count},
        {"formula_value", formula},
        {"certified", result.certified && recertified},
        {"topology", topology_to_json(result.topology, p)},
    };
    out << j.dump(2) << '\n';
  } else {
    if (cfg.out_path.empty()) out << emit_topology(result.topology, p);
    out << "links: " << result.link_count << " (closed form " << formula << ")\n";
    out << "sensors: " << result.chosen_m << '\n';
    out << "certified: " << (result.certified && recertified ? "yes" : "no") << '\n';
    if (!cfg.out_path.empty()) out << "written: " << cfg.out_path << '\n';
  }
  return result.certified && recertified ? kExitSuccess : kExitNegative;
}

int cmd_synthesize(const RunConfig& cfg, std::ostream& out) {
  SynthesisSpec spec;
  spec.n = require(cfg.n, "--n");
  spec.p = require(cfg.p, "--p");
  spec.m = cfg.m;
  spec.attack_class = parse_attack_class(cfg.attack_class);
  spec.link_cost = cfg.k1;
  spec.sensor_cost = cfg.k2;
  const SynthesisResult result = synthesize(spec);
  return emit_synthesis(cfg, result, spec.p, spec.attack_class, "synthesize", out);
}

int cmd_platoon(const RunConfig& cfg, std::ostream& out) {
  const int n = require(cfg.n, "--n");
  const int m = require(cfg.m, "--m");
  const int p = require(cfg.p, "--p");
  const AttackClass c = parse_attack_class(cfg.attack_class);
  return emit_synthesis(cfg, synthesize_platoon(n, m, p, c), p, c, "platoon", out);
}

int cmd_sensors(const RunConfig& cfg, std::ostream& out) {
  const int n = require(cfg.n, "--n");
  const int p = require(cfg.p, "--p");
  const AttackClass c = parse_attack_class(cfg.attack_class);
  const SensorChoice choice = optimal_sensor_count(n, p, cfg.k1, cfg.k2, c);
  const std::size_t links = min_links_value(n, choice.m, p, c);
  if (cfg.as_json) {
    out << json{{"command", "sensors"},
                {"m", choice.m},
                {"cost", choice.cost},
                {"links", links},
                {"class", std::string(to_string(c))}}
               .dump(2)
        << '\n';
  } else {
    out << "m*=" << choice.m << '\n';
    out << "links: " << links << '\n';
    out << "cost: " << choice.cost << '\n';
  }
  return kExitSuccess;
}

// ------------------------------------------------------ simulate / attack

Realization load_realization(const RunConfig& cfg, const StructuredSystem& sys,
                             std::uint64_t seed) {
  Realization real;
  if (!cfg.realization_in.empty()) {
    std::ifstream in(cfg.realization_in);
    if (!in) throw InvalidInput("cannot read realization " + cfg.realization_in);
    real = read_realization(in);
    if (real.agents() != sys.topology().agent_count() ||
        real.observers() != sys.topology().observer_count() ||
        real.inputs() != sys.attack_input_count())
      throw InvalidInput("realization does not match topology and attack set");
  } else {
    RealizeOptions opts;
    opts.spectral_radius = cfg.rho;
    opts.process_noise = cfg.process_noise;
    opts.measurement_noise = cfg.measurement_noise;
    real = realize(sys, seed, opts);
  }
  if (cfg.eta) real.eta = *cfg.eta;
  if (!cfg.realization_out.empty()) {
    std::ofstream o(cfg.realization_out);
    if (!o) throw InvalidInput("cannot write realization " + cfg.realization_out);
    write_realization(o, real);
  }
  return real;
}

double max_abs(const std::vector<Eigen::VectorXd>& seq) {
  double best = 0.0;
  for (const auto& v : seq)
    if (v.size() > 0) best = std::max(best, v.cwiseAbs().maxCoeff());
  return best;
}

struct AlarmSummary {
  long nominal = 0;
  long attacked = 0;
  bool identical = true;
};

AlarmSummary summarize(const SimulationResult& r) {
  AlarmSummary s;
  for (std::size_t k = 0; k < r.nominal.alarm.size(); ++k) {
    s.nominal += r.nominal.alarm[k];
    if (r.attacked) {
      s.attacked += r.attacked->alarm[k];
      if (r.attacked->alarm[k] != r.nominal.alarm[k]) s.identical = false;
    }
  }
  return s;
}

void write_trace(const RunConfig& cfg, const SimulationResult& r) {
  if (cfg.out_path.empty()) return;
  std::ofstream o(cfg.out_path);
  if (!o) throw InvalidInput("cannot write trace " + cfg.out_path);
  write_trace_csv(o, r);
}

json simulation_json(const char* command, const SimulationResult& r,
                     const Realization& real, std::uint64_t seed) {
  const AlarmSummary s = summarize(r);
  json j = {{"command", command},
            {"seed", seed},
            {"horizon", r.horizon},
            {"eta", real.eta},
            {"alarms_nominal", s.nominal}};
  if (r.attacked) {
    j["alarms_attacked"] = s.attacked;
    j["alarm_sequences_identical"] = s.identical;
    j["max_abs_delta_z"] = max_abs(r.delta->dz);
    j["max_abs_delta_x"] = max_abs(r.delta->dx);
  }
  return j;
}

void print_simulation(const SimulationResult& r, std::ostream& out) {
  const AlarmSummary s = summarize(r);
  out << "steps: " << r.horizon << '\n';
  out << "alarms (nominal): " << s.nominal << '\n';
  if (r.attacked) {
    out << "alarms (attacked): " << s.attacked << '\n';
    out << "alarm sequences identical: " << (s.identical ? "yes" : "no") << '\n';
    out << std::setprecision(6);
    out << "max |dz|: " << max_abs(r.delta->dz) << '\n';
    out << "max |dx|: " << max_abs(r.delta->dx) << '\n';
  }
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const TopologyDocument doc = read_topology_file(cfg.topology_path);
  std::vector<std::string> warnings;
  const StructuredSystem sys = load_system(cfg, doc, warnings);
  const std::uint64_t seed = effective_seed(cfg);
  const Realization real = load_realization(cfg, sys, seed);
  const int horizon = cfg.horizon.value_or(200);
  std::optional<InputSequence> attack;
  if (sys.attack_input_count() > 0)
    attack = InputSequence(static_cast<std::size_t>(horizon),
                           Eigen::VectorXd::Constant(sys.attack_input_count(),
                                                     cfg.attack_magnitude));
  const SimulationResult r = simulate(real, attack, seed, horizon);
  write_trace(cfg, r);
  if (cfg.as_json) {
    json j = simulation_json("simulate", r, real, seed);
    j["warnings"] = warnings;
    out << j.dump(2) << '\n';
  } else {
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    out << "seed: " << seed << '\n';
    print_simulation(r, out);
  }
  return kExitSuccess;
}

int cmd_attack(const RunConfig& cfg, std::ostream& out) {
  const TopologyDocument doc = read_topology_file(cfg.topology_path);
  std::vector<std::string> warnings;
  const StructuredSystem sys = load_system(cfg, doc, warnings);
  if (sys.attack_input_count() == 0) throw InvalidInput("attack needs a non-empty --attack set");
  const std::uint64_t seed = effective_seed(cfg);
  const Realization real = load_realization(cfg, sys, seed);
  const int horizon = cfg.horizon.value_or(2 * sys.topology().agent_count());
  const PerfectAttackSearch search = find_perfect_attack(real, horizon);

  std::optional<SimulationResult> r;
  if (search.attack) {
    r = simulate(real, search.attack->inputs, seed, horizon);
    write_trace(cfg, *r);
  }
  if (cfg.as_json) {
    json j = r ? simulation_json("attack", *r, real, seed)
               : json{{"command", "attack"}, {"seed", seed}, {"horizon", horizon}};
    j["perfect_attack_found"] = search.attack.has_value();
    j["null_dimension"] = search.null_dimension;
    j["smallest_singular_value"] = search.smallest_singular_value;
    j["ambiguous"] = search.ambiguous;
    j["warnings"] = warnings;
    out << j.dump(2) << '\n';
  } else {
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    out << "seed: " << seed << '\n';
    if (search.ambiguous)
      out << "warning: a singular value lies near the rank cut-off (smallest "
          << search.smallest_singular_value << ")\n";
    out << "perfect attack: " << (search.attack ? "found" : "none") << '\n';
    if (r) print_simulation(*r, out);
  }
  return search.attack ? kExitSuccess : kExitNegative;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Perfect-attack analysis and robust topology synthesis for "
               "distributed control systems",
               "stealthguard"};
  app.require_subcommand(1);

  auto add_json = [&](CLI::App* sub) {
    sub->add_flag("--json", cfg.as_json, "Machine-readable JSON report");
  };
  auto add_topology = [&](CLI::App* sub) {
    sub->add_option("--topology", cfg.topology_path, "Topology file")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_class = [&](CLI::App* sub) {
    sub->add_option("--class", cfg.attack_class, "Attack class: x (agents) or xy (agents and observers)")
        ->check(CLI::IsMember({"x", "xy"}));
  };
  auto add_numeric = [&](CLI::App* sub) {
    sub->add_option("--attack", cfg.attack, "Compromised nodes, e.g. x1,y2");
    sub->add_option("--p", cfg.p, "Attack bound (defaults to the file header)");
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--horizon", cfg.horizon, "Number of simulated steps");
    sub->add_option("--eta", cfg.eta, "Detector threshold (default: chi-square 95%)");
    sub->add_option("--rho", cfg.rho, "Spectral radius of the drawn A");
    sub->add_option("--process-noise", cfg.process_noise, "Q = q I");
    sub->add_option("--measurement-noise", cfg.measurement_noise, "R = r I");
    sub->add_option("--out", cfg.out_path, "Trace CSV output");
    sub->add_option("--realization-in", cfg.realization_in, "Load matrices instead of drawing them");
    sub->add_option("--realization-out", cfg.realization_out, "Save the realization used");
    add_topology(sub);
    add_json(sub);
  };

  auto* analyze = app.add_subcommand("analyze", "Structural left invertibility for one attack set");
  add_topology(analyze);
  analyze->add_option("--attack", cfg.attack, "Compromised nodes, e.g. x1,y2");
  analyze->add_option("--p", cfg.p, "Attack bound (defaults to the file header)");
  add_json(analyze);

  auto* certify = app.add_subcommand("certify", "Robustness against every attack set of size <= p");
  add_topology(certify);
  certify->add_option("--p", cfg.p, "Attack bound (defaults to the file header)");
  add_class(certify);
  add_json(certify);

  auto* synth = app.add_subcommand("synthesize", "Minimum-link robust topology");
  synth->add_option("--n", cfg.n, "Agents")->required();
  synth->add_option("--m", cfg.m, "Sensors (omit to optimize with --k1/--k2)");
  synth->add_option("--p", cfg.p, "Attack bound")->required();
  synth->add_option("--k1", cfg.k1, "Cost per link");
  synth->add_option("--k2", cfg.k2, "Cost per sensor");
  synth->add_option("--out", cfg.out_path, "Topology output file");
  add_class(synth);
  add_json(synth);

  auto* platoon = app.add_subcommand("platoon", "Minimum-link robust platoon topology");
  platoon->add_option("--n", cfg.n, "Vehicles")->required();
  platoon->add_option("--m", cfg.m, "Sensors on the last m vehicles")->required();
  platoon->add_option("--p", cfg.p, "Attack bound")->required();
  platoon->add_option("--out", cfg.out_path, "Topology output file");
  add_class(platoon);
  add_json(platoon);

  auto* sensors = app.add_subcommand("sensors", "Cost-optimal number of sensors");
  sensors->add_option("--n", cfg.n, "Agents")->required();
  sensors->add_option("--p", cfg.p, "Attack bound")->required();
  sensors->add_option("--k1", cfg.k1, "Cost per link")->required();
  sensors->add_option("--k2", cfg.k2, "Cost per sensor")->required();
  add_class(sensors);
  add_json(sensors);

  auto* sim = app.add_subcommand("simulate", "Nominal vs constant-bias attacked run with the chi-square detector");
  add_numeric(sim);
  sim->add_option("--magnitude", cfg.attack_magnitude, "Constant attack input value");

  auto* atk = app.add_subcommand("attack", "Search for a perfect attack and replay it");
  add_numeric(atk);

  std::vector<const char*> argv{"stealthguard"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(cfg, out);
    if (certify->parsed()) return cmd_certify(cfg, out);
    if (synth->parsed()) return cmd_synthesize(cfg, out);
    if (platoon->parsed()) return cmd_platoon(cfg, out);
    if (sensors->parsed()) return cmd_sensors(cfg, out);
    if (sim->parsed()) return cmd_simulate(cfg, out);
    if (atk->parsed()) return cmd_attack(cfg, out);
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace stealthguard
