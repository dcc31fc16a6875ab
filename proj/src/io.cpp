// Copyright 2026 The marsc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "marsc/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "marsc/values.hpp"

namespace marsc {
namespace {

Json location_json(const Location& l) {
  return Json{{"id", l.id}, {"coords", Json::array({l.first, l.second})}};
}

Json coalition_json(const Coalition& c) { return Json(c.members()); }

}  // namespace

Json instance_to_json(const Instance& instance) {
  Json doc;
  doc["locations"] = Json::array();
  for (const auto& l : instance.locations()) doc["locations"].push_back(location_json(l));
  doc["agents"] = Json::array();
  for (const auto& a : instance.agents()) {
    doc["agents"].push_back(
        {{"id", a.id}, {"initial_location", a.initial_location}, {"speed", a.speed}});
  }
  doc["nodes"] = Json::array();
  for (const auto& n : instance.nodes()) {
    doc["nodes"].push_back({{"locations", n.locations()},
                            {"workload", n.workload()},
                            {"profit", n.profit()},
                            {"earliest", n.earliest()},
                            {"soft_latest", n.soft_latest()},
                            {"hard_latest", n.hard_latest()}});
  }
  doc["precedence"] = Json::array();
  for (const auto& [from, to] : instance.precedence().edges()) {
    doc["precedence"].push_back(Json::array({from, to}));
  }
  doc["travel"] = {{"mode", to_string(instance.travel().mode())},
                   {"earth_radius", instance.travel().earth_radius()}};
  doc["t_max"] = instance.t_max();
  doc["values"] = {{"kind", std::string(to_string(instance.values().kind()))},
                   {"seed", instance.values().seed()}};
  doc["singleton_coalitions"] = instance.singleton_coalitions();
  return doc;
}

Instance instance_from_json(const Json& doc) {
  std::vector<Location> locations;
  for (const auto& l : doc.at("locations")) {
    const auto& coords = l.at("coords");
    if (!coords.is_array() || coords.size() != 2) {
      throw std::invalid_argument("location coords must be a pair");
    }
    locations.push_back(
        Location{l.at("id").get<LocationId>(), coords[0].get<double>(), coords[1].get<double>()});
  }
  std::vector<Agent> agents;
  for (const auto& a : doc.at("agents")) {
    agents.push_back(Agent{a.at("id").get<AgentId>(), a.at("initial_location").get<LocationId>(),
                           a.value("speed", 1.0)});
  }
  std::vector<NodeDemand> nodes;
  for (const auto& n : doc.at("nodes")) {
    nodes.emplace_back(n.at("locations").get<std::vector<LocationId>>(),
                       n.at("workload").get<double>(), n.at("profit").get<double>(),
                       n.at("earliest").get<Time>(), n.at("soft_latest").get<Time>(),
                       n.at("hard_latest").get<Time>());
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& e : doc.at("precedence")) {
    edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
  }
  const auto& travel_doc = doc.at("travel");
  TravelModel travel(parse_distance_mode(travel_doc.at("mode").get<std::string>()),
                     travel_doc.value("earth_radius", TravelModel::kEarthRadiusMeters));
  ValueKind kind = ValueKind::kSuperadditive;
  std::uint64_t seed = 0;
  if (doc.contains("values")) {
    kind = parse_value_kind(doc["values"].at("kind").get<std::string>());
    seed = doc["values"].value("seed", std::uint64_t{0});
  }
  auto values = std::make_shared<CoalitionValueModel>(kind, seed, agents.size());
  const std::size_t m = nodes.size();
  Instance instance(std::move(locations), std::move(agents), std::move(nodes),
                    PrecedenceDag(m, std::move(edges)), travel, std::move(values),
                    doc.value("singleton_coalitions", false));
  if (doc.contains("t_max") && doc["t_max"].get<Time>() != instance.t_max()) {
    throw std::invalid_argument("t_max must equal the largest hard latest time (" +
                                std::to_string(instance.t_max()) + ")");
  }
  return instance;
}

Json solution_to_json(const Solution& solution, double score) {
  Json doc;
  doc["solver"] = solution.metadata.solver;
  doc["score"] = score;
  doc["traversals"] = solution.metadata.traversals;
  doc["wall_millis"] = solution.metadata.wall_millis;
  doc["visits"] = Json::array();
  for (const auto& visit : solution.visits) {
    Json v{{"node", visit.node}, {"location", visit.location}, {"entries", Json::array()}};
    for (const auto& e : visit.entries) {
      v["entries"].push_back({{"t", e.time}, {"coalition", coalition_json(e.coalition)}});
    }
    doc["visits"].push_back(std::move(v));
  }
  return doc;
}

Solution solution_from_json(const Json& doc) {
  Solution out;
  out.metadata.solver = doc.value("solver", std::string{});
  out.metadata.traversals = doc.value("traversals", std::uint64_t{0});
  out.metadata.wall_millis = doc.value("wall_millis", 0.0);
  for (const auto& v : doc.at("visits")) {
    NodeVisit visit;
    visit.node = v.at("node").get<NodeId>();
    visit.location = v.at("location").get<LocationId>();
    for (const auto& e : v.at("entries")) {
      visit.entries.push_back(
          {e.at("t").get<Time>(), Coalition(e.at("coalition").get<std::vector<AgentId>>())});
    }
    out.visits.push_back(std::move(visit));
  }
  return out;
}

Json violation_to_json(const Violation& violation) {
  return Json{{"family", to_string(violation.family)},
              {"nodes", violation.nodes},
              {"agents", violation.agents},
              {"time", violation.time},
              {"detail", violation.detail}};
}

std::string to_json_lines(const ViolationReport& report) {
  std::string out;
  for (const auto& v : report.violations) {
    out += violation_to_json(v).dump();
    out += '\n';
  }
  return out;
}

Json toptw_to_json(const ToptwInstance& toptw) {
  Json doc;
  doc["locations"] = Json::array();
  for (const auto& l : toptw.locations) doc["locations"].push_back(location_json(l));
  doc["mode"] = to_string(toptw.mode);
  doc["speed"] = toptw.speed;
  doc["nodes"] = Json::array();
  for (const auto& n : toptw.nodes) {
    doc["nodes"].push_back({{"location", n.location},
                            {"profit", n.profit},
                            {"earliest", n.earliest},
                            {"latest", n.latest}});
  }
  doc["start_node"] = toptw.start_node;
  doc["end_node"] = toptw.end_node;
  doc["t_max"] = toptw.t_max;
  doc["n_agents"] = toptw.n_agents;
  return doc;
}

ToptwInstance toptw_from_json(const Json& doc) {
  ToptwInstance out;
  for (const auto& l : doc.at("locations")) {
    const auto& coords = l.at("coords");
    out.locations.push_back(
        Location{l.at("id").get<LocationId>(), coords.at(0).get<double>(), coords.at(1).get<double>()});
  }
  out.mode = parse_distance_mode(doc.value("mode", std::string("grid")));
  out.speed = doc.value("speed", 1.0);
  for (const auto& n : doc.at("nodes")) {
    out.nodes.push_back(ToptwNode{n.at("location").get<LocationId>(), n.at("profit").get<double>(),
                                  n.at("earliest").get<Time>(), n.at("latest").get<Time>()});
  }
  out.start_node = doc.at("start_node").get<NodeId>();
  out.end_node = doc.at("end_node").get<NodeId>();
  out.t_max = doc.at("t_max").get<Time>();
  out.n_agents = doc.at("n_agents").get<std::size_t>();
  out.check();
  return out;
}

ScenarioParams scenario_params_from_json(const Json& doc) {
  ScenarioParams p;
  p.n_agents = doc.value("n_agents", p.n_agents);
  p.ratio = doc.value("ratio", p.ratio);
  if (doc.contains("values")) {
    p.value_kind = parse_value_kind(doc["values"].at("kind").get<std::string>());
    p.seed = doc["values"].value("seed", p.seed);
  }
  if (doc.contains("value_kind")) p.value_kind = parse_value_kind(doc["value_kind"].get<std::string>());
  p.seed = doc.value("seed", p.seed);
  p.speed = doc.value("speed", p.speed);
  p.precedence_prob = doc.value("precedence_prob", p.precedence_prob);
  p.profit = doc.value("profit", p.profit);
  p.record_offset = doc.value("record_offset", p.record_offset);
  p.station_pool = doc.value("station_pool", p.station_pool);
  p.attendance_min = doc.value("attendance_min", p.attendance_min);
  p.attendance_max = doc.value("attendance_max", p.attendance_max);
  if (doc.contains("box")) {
    const auto& b = doc["box"];
    p.box.lat_min = b.value("lat_min", p.box.lat_min);
    p.box.lat_max = b.value("lat_max", p.box.lat_max);
    p.box.lon_min = b.value("lon_min", p.box.lon_min);
    p.box.lon_max = b.value("lon_max", p.box.lon_max);
  }
  p.check();
  return p;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace marsc
