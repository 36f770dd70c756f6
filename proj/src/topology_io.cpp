#include "stealthguard/topology_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "stealthguard/error.hpp"

namespace stealthguard {
namespace {

struct RawTopology {
  int n = 0, m = 0, p = 0;
  std::vector<AgentEdge> edges;
  std::vector<std::optional<int>> sensed;
};

int expect_agent(const std::string& token, std::size_t line) {
  try {
    const NodeId id = parse_node_id(token);
    if (id.kind == NodeKind::agent) return id.index;
  } catch (const InvalidInput&) {
  }
  throw ParseError(line, "expected agent id x<i>, got '" + token + "'");
}

int expect_observer(const std::string& token, std::size_t line) {
  try {
    const NodeId id = parse_node_id(token);
    if (id.kind == NodeKind::observer) return id.index;
  } catch (const InvalidInput&) {
  }
  throw ParseError(line, "expected observer id y<k>, got '" + token + "'");
}

TopologyDocument finish(RawTopology raw, std::size_t line) {
  std::vector<int> sensed;
  for (int k = 0; k < raw.m; ++k) {
    if (!raw.sensed[k])
      throw ParseError(line, "observer " + to_string(NodeId::observer(k)) +
                                 " has no sensor line");
    sensed.push_back(*raw.sensed[k]);
  }
  try {
    return {DcsTopology(raw.n, std::move(raw.edges), std::move(sensed)), raw.p};
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ParseError(line, e.what());
  }
}

void check_header(const RawTopology& raw, std::size_t line) {
  if (raw.n < 0 || raw.m < 0 || raw.p < 0)
    throw ParseError(line, "header values must be non-negative");
  if (raw.m > raw.n) throw ParseError(line, "m must not exceed n");
}

void add_edge(RawTopology& raw, int from, int to, std::size_t line) {
  if (from >= raw.n || to >= raw.n)
    throw ParseError(line, "edge endpoint beyond n = " + std::to_string(raw.n));
  for (const auto& e : raw.edges)
    if (e.from == from && e.to == to)
      throw ParseError(line, "duplicate edge " + to_string(NodeId::agent(from)) +
                                 " " + to_string(NodeId::agent(to)));
  raw.edges.push_back({from, to});
}

void add_sensor(RawTopology& raw, int observer, int agent, std::size_t line) {
  if (observer >= raw.m)
    throw ParseError(line, "observer beyond m = " + std::to_string(raw.m));
  if (agent >= raw.n)
    throw ParseError(line, "agent beyond n = " + std::to_string(raw.n));
  if (raw.sensed[observer])
    throw ParseError(line, to_string(NodeId::observer(observer)) +
                               " already has a sensor line");
  raw.sensed[observer] = agent;
}

TopologyDocument parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  RawTopology raw;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!have_header) {
      if (tok.size() != 3) throw ParseError(line_no, "expected header 'n m p'");
      try {
        std::size_t used = 0;
        int* slots[] = {&raw.n, &raw.m, &raw.p};
        for (int i = 0; i < 3; ++i) {
          *slots[i] = std::stoi(tok[i], &used);
          if (used != tok[i].size()) throw std::invalid_argument("trailing");
        }
      } catch (const std::logic_error&) {
        throw ParseError(line_no, "header must be three integers 'n m p'");
      }
      check_header(raw, line_no);
      raw.sensed.assign(static_cast<std::size_t>(raw.m), std::nullopt);
      have_header = true;
      continue;
    }

    if (tok[0] == "edge") {
      if (tok.size() != 3) throw ParseError(line_no, "expected 'edge x<i> x<j>'");
      add_edge(raw, expect_agent(tok[1], line_no), expect_agent(tok[2], line_no),
               line_no);
    } else if (tok[0] == "sensor") {
      if (tok.size() != 3) throw ParseError(line_no, "expected 'sensor y<k> x<j>'");
      add_sensor(raw, expect_observer(tok[1], line_no),
                 expect_agent(tok[2], line_no), line_no);
    } else {
      throw ParseError(line_no, "unknown directive '" + tok[0] + "'");
    }
  }
  if (!have_header) throw ParseError(line_no, "missing header 'n m p'");
  return finish(std::move(raw), line_no);
}

TopologyDocument parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(line, std::string("invalid JSON: ") + e.what());
  }
  try {
    RawTopology raw;
    raw.n = doc.at("n").get<int>();
    raw.m = doc.at("m").get<int>();
    raw.p = doc.value("p", 0);
    check_header(raw, 1);
    raw.sensed.assign(static_cast<std::size_t>(raw.m), std::nullopt);
    for (const auto& e : doc.value("edges", nlohmann::json::array())) {
      add_edge(raw, expect_agent(e.at(0).get<std::string>(), 1),
               expect_agent(e.at(1).get<std::string>(), 1), 1);
    }
    for (const auto& s : doc.value("sensors", nlohmann::json::array())) {
      add_sensor(raw, expect_observer(s.at(0).get<std::string>(), 1),
                 expect_agent(s.at(1).get<std::string>(), 1), 1);
    }
    return finish(std::move(raw), 1);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("malformed topology JSON: ") + e.what());
  }
}

}  // namespace

TopologyDocument parse_topology(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_json(text);
  return parse_text(text);
}

TopologyDocument read_topology_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read topology file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_topology(buf.str());
}

std::string emit_topology(const DcsTopology& topology, int p) {
  std::ostringstream out;
  out << topology.agent_count() << ' ' << topology.observer_count() << ' ' << p
      << '\n';
  for (const auto& e : topology.agent_edges())
    out << "edge " << to_string(NodeId::agent(e.from)) << ' '
        << to_string(NodeId::agent(e.to)) << '\n';
  for (int k = 0; k < topology.observer_count(); ++k)
    out << "sensor " << to_string(NodeId::observer(k)) << ' '
        << to_string(NodeId::agent(topology.sensed_agent(k))) << '\n';
  return out.str();
}

nlohmann::json topology_to_json(const DcsTopology& topology, int p) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : topology.agent_edges())
    edges.push_back({to_string(NodeId::agent(e.from)), to_string(NodeId::agent(e.to))});
  nlohmann::json sensors = nlohmann::json::array();
  for (int k = 0; k < topology.observer_count(); ++k)
    sensors.push_back({to_string(NodeId::observer(k)),
                       to_string(NodeId::agent(topology.sensed_agent(k)))});
  return {{"n", topology.agent_count()},
          {"m", topology.observer_count()},
          {"p", p},
          {"edges", std::move(edges)},
          {"sensors", std::move(sensors)}};
}

void write_topology_file(const std::filesystem::path& path,
                         const DcsTopology& topology, int p) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write topology file " + path.string());
  out << emit_topology(topology, p);
  if (!out) throw InvalidInput("failed writing " + path.string());
}

}  // namespace stealthguard
