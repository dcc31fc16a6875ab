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

#include "marsc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "marsc/values.hpp"

namespace marsc {

std::string to_string(DistanceMode mode) {
  return mode == DistanceMode::kGeo ? "geo" : "grid";
}

std::string to_string(Accrual accrual) {
  return accrual == Accrual::kLiteral ? "literal" : "completion";
}

DistanceMode parse_distance_mode(const std::string& text) {
  if (text == "geo") return DistanceMode::kGeo;
  if (text == "grid") return DistanceMode::kGrid;
  throw std::invalid_argument("unknown distance mode: " + text);
}

Accrual parse_accrual(const std::string& text) {
  if (text == "literal") return Accrual::kLiteral;
  if (text == "completion") return Accrual::kCompletion;
  throw std::invalid_argument("unknown accrual mode: " + text);
}

NodeDemand::NodeDemand(std::vector<LocationId> locations, double workload,
                       double profit, Time earliest, Time soft_latest,
                       Time hard_latest)
    : locations_(std::move(locations)),
      workload_(workload),
      profit_(profit),
      earliest_(earliest),
      soft_latest_(soft_latest),
      hard_latest_(hard_latest) {
  if (locations_.empty()) {
    throw std::invalid_argument("node demand needs at least one location");
  }
  if (!(workload_ >= 0.0) || !(profit_ >= 0.0)) {
    throw std::invalid_argument("node workload and profit must be >= 0");
  }
  if (earliest_ < 0 || earliest_ > soft_latest_ || soft_latest_ > hard_latest_) {
    throw std::invalid_argument(
        "node window must satisfy 0 <= earliest <= soft_latest <= hard_latest");
  }
}

bool NodeDemand::allows_location(LocationId l) const {
  return std::find(locations_.begin(), locations_.end(), l) != locations_.end();
}

PrecedenceDag::PrecedenceDag(std::size_t node_count,
                             std::vector<std::pair<NodeId, NodeId>> edges)
    : node_count_(node_count),
      edges_(std::move(edges)),
      preds_(node_count),
      succs_(node_count) {
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& [from, to] : edges_) {
    if (from >= node_count_ || to >= node_count_) {
      throw std::invalid_argument("precedence edge references unknown node");
    }
    if (from == to) throw std::invalid_argument("precedence self-loop");
    if (!seen.insert({from, to}).second) {
      throw std::invalid_argument("duplicate precedence edge");
    }
    succs_[from].push_back(to);
    preds_[to].push_back(from);
  }

  // Kahn's algorithm for the cycle check.
  std::vector<std::size_t> indegree(node_count_);
  for (const auto& e : edges_) ++indegree[e.second];
  std::vector<NodeId> stack;
  for (NodeId v = 0; v < node_count_; ++v) {
    if (indegree[v] == 0) stack.push_back(v);
  }
  std::size_t emitted = 0;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    ++emitted;
    for (NodeId w : succs_[v]) {
      if (--indegree[w] == 0) stack.push_back(w);
    }
  }
  if (emitted != node_count_) {
    throw std::invalid_argument("precedence graph contains a cycle");
  }

  // An edge (u, w) is transitively inferable if w is reachable from u
  // without using that edge.
  for (const auto& [from, to] : edges_) {
    std::vector<char> reached(node_count_, 0);
    std::vector<NodeId> frontier;
    for (NodeId s : succs_[from]) {
      if (s != to && !reached[s]) {
        reached[s] = 1;
        frontier.push_back(s);
      }
    }
    while (!frontier.empty()) {
      const NodeId v = frontier.back();
      frontier.pop_back();
      if (v == to) {
        throw std::invalid_argument(
            "precedence edge " + std::to_string(from) + "->" +
            std::to_string(to) + " is implied transitively");
      }
      for (NodeId w : succs_[v]) {
        if (!reached[w]) {
          reached[w] = 1;
          frontier.push_back(w);
        }
      }
    }
  }
}

Coalition::Coalition(std::initializer_list<AgentId> members) {
  for (AgentId a : members) insert(a);
}

Coalition::Coalition(const std::vector<AgentId>& members) {
  for (AgentId a : members) insert(a);
}

void Coalition::insert(AgentId a) {
  if (a >= kMaxAgents) throw std::out_of_range("agent id exceeds coalition width");
  bits_.set(a);
}

std::vector<AgentId> Coalition::members() const {
  std::vector<AgentId> out;
  out.reserve(bits_.count());
  for (std::size_t a = bits_._Find_first(); a < kMaxAgents; a = bits_._Find_next(a)) {
    out.push_back(static_cast<AgentId>(a));
  }
  return out;
}

const NodeVisit* Solution::find_visit(NodeId v) const {
  for (const auto& visit : visits) {
    if (visit.node == v) return &visit;
  }
  return nullptr;
}

TravelModel::TravelModel(DistanceMode mode, double earth_radius)
    : mode_(mode), earth_radius_(earth_radius) {
  if (!(earth_radius_ > 0.0)) throw std::invalid_argument("earth radius must be > 0");
}

double TravelModel::distance(const Location& from, const Location& to) const {
  if (mode_ == DistanceMode::kGrid) {
    return std::abs(from.first - to.first) + std::abs(from.second - to.second);
  }
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const double lat1 = from.first * kDegToRad;
  const double lat2 = to.first * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (to.second - from.second) * kDegToRad;
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  return 2.0 * earth_radius_ * std::asin(std::min(1.0, std::sqrt(h)));
}

Time TravelModel::travel_time(const Agent& agent, const Location& from,
                              const Location& to) const {
  if (!(agent.speed > 0.0)) throw std::domain_error("agent speed must be > 0");
  if (from.id == to.id) return 0;
  const double d = distance(from, to);
  // Guard against 1e-12 style noise pushing an exact multiple up by one unit.
  const double units = d / agent.speed;
  const double rounded = std::round(units);
  if (std::abs(units - rounded) < kEpsilon) return static_cast<Time>(rounded);
  return static_cast<Time>(std::ceil(units));
}

Instance::Instance(std::vector<Location> locations, std::vector<Agent> agents,
                   std::vector<NodeDemand> nodes, PrecedenceDag precedence,
                   TravelModel travel,
                   std::shared_ptr<const CoalitionValueModel> values,
                   bool singleton_coalitions)
    : locations_(std::move(locations)),
      agents_(std::move(agents)),
      nodes_(std::move(nodes)),
      precedence_(std::move(precedence)),
      travel_(travel),
      values_(std::move(values)),
      singleton_coalitions_(singleton_coalitions) {
  if (agents_.empty()) throw std::invalid_argument("instance needs at least one agent");
  if (agents_.size() > kMaxAgents) throw std::invalid_argument("too many agents");
  if (!values_) throw std::invalid_argument("instance needs a coalition value model");
  if (values_->n_agents() != agents_.size()) {
    throw std::invalid_argument("value model agent count does not match instance");
  }
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    const auto& loc = locations_[i];
    if (!location_index_.emplace(loc.id, i).second) {
      throw std::invalid_argument("duplicate location id " + std::to_string(loc.id));
    }
    if (travel_.mode() == DistanceMode::kGeo &&
        (loc.first < -90.0 || loc.first > 90.0 || loc.second < -180.0 ||
         loc.second > 180.0)) {
      throw std::invalid_argument("location " + std::to_string(loc.id) +
                                  " has out-of-range coordinates");
    }
  }
  for (std::size_t a = 0; a < agents_.size(); ++a) {
    if (agents_[a].id != a) throw std::invalid_argument("agent ids must be dense 0..n-1");
    if (!(agents_[a].speed > 0.0)) throw std::invalid_argument("agent speed must be > 0");
    if (!has_location(agents_[a].initial_location)) {
      throw std::invalid_argument("agent references unknown location");
    }
  }
  for (const auto& node : nodes_) {
    for (LocationId l : node.locations()) {
      if (!has_location(l)) throw std::invalid_argument("node references unknown location");
    }
    t_max_ = std::max(t_max_, node.hard_latest());
  }
  if (precedence_.node_count() != nodes_.size()) {
    throw std::invalid_argument("precedence node count does not match instance");
  }
}

const Location& Instance::location(LocationId id) const {
  auto it = location_index_.find(id);
  if (it == location_index_.end()) {
    throw std::out_of_range("unknown location id " + std::to_string(id));
  }
  return locations_[it->second];
}

Time Instance::travel_time(AgentId a, LocationId from, LocationId to) const {
  return travel_.travel_time(agent(a), location(from), location(to));
}

double Instance::distance(LocationId from, LocationId to) const {
  return travel_.distance(location(from), location(to));
}

double Instance::value(const Coalition& c, NodeId v, LocationId l) const {
  return values_->value(c, v, l);
}

double penalty(Time t, const NodeDemand& demand) {
  if (!demand.in_window(t)) {
    throw std::domain_error("penalty: time " + std::to_string(t) +
                            " outside the node window");
  }
  if (t <= demand.soft_latest()) return 1.0;
  const double late = static_cast<double>(t - demand.soft_latest());
  const double span =
      static_cast<double>(demand.hard_latest() - demand.soft_latest() + 1);
  return 1.0 - late / span;
}

CompletionStatus completion_status(const NodeVisit& visit,
                                   const Instance& instance) {
  const NodeDemand& demand = instance.node(visit.node);
  const double target = demand.workload() - kEpsilon;
  if (visit.entries.empty()) {
    if (target <= 0.0) return Complete{demand.earliest()};
    return Incomplete{demand.workload()};
  }
  std::vector<const WorkEntry*> ordered;
  ordered.reserve(visit.entries.size());
  for (const auto& e : visit.entries) ordered.push_back(&e);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const WorkEntry* a, const WorkEntry* b) { return a->time < b->time; });
  double done = 0.0;
  for (const WorkEntry* e : ordered) {
    if (!e->coalition.empty()) {
      done += instance.value(e->coalition, visit.node, visit.location);
    }
    if (done >= target) return Complete{e->time};
  }
  return Incomplete{demand.workload() - done};
}

double visit_score(const NodeVisit& visit, const Instance& instance,
                   Accrual accrual) {
  const NodeDemand& demand = instance.node(visit.node);
  if (accrual == Accrual::kLiteral) {
    double total = 0.0;
    for (const auto& e : visit.entries) {
      if (demand.in_window(e.time)) total += demand.profit() * penalty(e.time, demand);
    }
    return total;
  }
  if (visit.entries.empty()) return 0.0;
  const auto status = completion_status(visit, instance);
  if (const auto* done = std::get_if<Complete>(&status)) {
    if (demand.in_window(done->at)) return demand.profit() * penalty(done->at, demand);
  }
  return 0.0;
}

double score(const Solution& solution, const Instance& instance,
             Accrual accrual) {
  double total = 0.0;
  for (const auto& visit : solution.visits) total += visit_score(visit, instance, accrual);
  return total;
}

}  // namespace marsc
