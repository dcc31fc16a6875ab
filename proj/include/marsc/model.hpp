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

#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace marsc {

// Discrete time grid, base unit 1.
using Time = std::int64_t;
using NodeId = std::uint32_t;
using AgentId = std::uint32_t;
using LocationId = std::uint32_t;

// Absolute tolerance for every real-valued comparison in the library.
inline constexpr double kEpsilon = 1e-9;

inline constexpr std::size_t kMaxAgents = 256;

enum class DistanceMode { kGeo, kGrid };

// How the objective credits profit: once per worked time step (the
// integer-program objective as written) or once at completion time.
enum class Accrual { kLiteral, kCompletion };

std::string to_string(DistanceMode mode);
std::string to_string(Accrual accrual);
DistanceMode parse_distance_mode(const std::string& text);
Accrual parse_accrual(const std::string& text);

struct Location {
  LocationId id = 0;
  // (latitude, longitude) in degrees for geo mode, (x, y) cells for grid mode.
  double first = 0.0;
  double second = 0.0;
};

struct Agent {
  AgentId id = 0;
  LocationId initial_location = 0;
  // Meters per time unit (geo) or cells per time unit (grid).
  double speed = 1.0;
};

class NodeDemand {
 public:
  NodeDemand(std::vector<LocationId> locations, double workload, double profit,
             Time earliest, Time soft_latest, Time hard_latest);

  const std::vector<LocationId>& locations() const { return locations_; }
  double workload() const { return workload_; }
  double profit() const { return profit_; }
  Time earliest() const { return earliest_; }
  Time soft_latest() const { return soft_latest_; }
  Time hard_latest() const { return hard_latest_; }

  bool in_window(Time t) const { return t >= earliest_ && t <= hard_latest_; }
  bool allows_location(LocationId l) const;

 private:
  std::vector<LocationId> locations_;
  double workload_;
  double profit_;
  Time earliest_;
  Time soft_latest_;
  Time hard_latest_;
};

// Precedence relation over nodes 0..node_count-1. Construction rejects
// cycles and edges that are implied by a longer path.
class PrecedenceDag {
 public:
  PrecedenceDag() = default;
  PrecedenceDag(std::size_t node_count,
                std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const { return node_count_; }
  const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
  const std::vector<NodeId>& predecessors(NodeId v) const { return preds_[v]; }
  const std::vector<NodeId>& successors(NodeId v) const { return succs_[v]; }

 private:
  std::size_t node_count_ = 0;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::vector<std::vector<NodeId>> preds_;
  std::vector<std::vector<NodeId>> succs_;
};

// Fixed-width bit-set over agent ids.
class Coalition {
 public:
  using Bits = std::bitset<kMaxAgents>;

  Coalition() = default;
  Coalition(std::initializer_list<AgentId> members);
  explicit Coalition(const std::vector<AgentId>& members);

  void insert(AgentId a);
  bool contains(AgentId a) const { return a < kMaxAgents && bits_.test(a); }
  std::size_t size() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }
  std::vector<AgentId> members() const;
  const Bits& bits() const { return bits_; }

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  Bits bits_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const {
    return std::hash<Coalition::Bits>{}(c.bits());
  }
};

struct WorkEntry {
  Time time = 0;
  Coalition coalition;

  friend bool operator==(const WorkEntry&, const WorkEntry&) = default;
};

struct NodeVisit {
  NodeId node = 0;
  LocationId location = 0;
  std::vector<WorkEntry> entries;  // time-ordered

  friend bool operator==(const NodeVisit&, const NodeVisit&) = default;
};

struct SolutionMetadata {
  std::string solver;
  double wall_millis = 0.0;
  std::uint64_t traversals = 0;
};

struct Solution {
  std::vector<NodeVisit> visits;
  SolutionMetadata metadata;

  const NodeVisit* find_visit(NodeId v) const;
};

class TravelModel {
 public:
  static constexpr double kEarthRadiusMeters = 6371000.0;

  explicit TravelModel(DistanceMode mode = DistanceMode::kGrid,
                       double earth_radius = kEarthRadiusMeters);

  DistanceMode mode() const { return mode_; }
  double earth_radius() const { return earth_radius_; }

  // Great-circle meters (geo) or taxicab cells (grid).
  double distance(const Location& from, const Location& to) const;
  // ceil(distance / speed); zero for identical locations.
  Time travel_time(const Agent& agent, const Location& from,
                   const Location& to) const;

 private:
  DistanceMode mode_;
  double earth_radius_;
};

class CoalitionValueModel;

class Instance {
 public:
  Instance(std::vector<Location> locations, std::vector<Agent> agents,
           std::vector<NodeDemand> nodes, PrecedenceDag precedence,
           TravelModel travel, std::shared_ptr<const CoalitionValueModel> values,
           bool singleton_coalitions = false);

  const std::vector<Location>& locations() const { return locations_; }
  const std::vector<Agent>& agents() const { return agents_; }
  const std::vector<NodeDemand>& nodes() const { return nodes_; }
  const PrecedenceDag& precedence() const { return precedence_; }
  const TravelModel& travel() const { return travel_; }
  const CoalitionValueModel& values() const { return *values_; }
  std::shared_ptr<const CoalitionValueModel> values_ptr() const { return values_; }
  Time t_max() const { return t_max_; }
  bool singleton_coalitions() const { return singleton_coalitions_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t agent_count() const { return agents_.size(); }
  const NodeDemand& node(NodeId v) const { return nodes_.at(v); }
  const Agent& agent(AgentId a) const { return agents_.at(a); }

  // Throws std::out_of_range for an unknown id.
  const Location& location(LocationId id) const;
  bool has_location(LocationId id) const { return location_index_.contains(id); }

  Time travel_time(AgentId a, LocationId from, LocationId to) const;
  double distance(LocationId from, LocationId to) const;
  double value(const Coalition& c, NodeId v, LocationId l) const;

  // |A| * |V| * |L|
  std::size_t dim() const { return agents_.size() * nodes_.size() * locations_.size(); }

 private:
  std::vector<Location> locations_;
  std::vector<Agent> agents_;
  std::vector<NodeDemand> nodes_;
  PrecedenceDag precedence_;
  TravelModel travel_;
  std::shared_ptr<const CoalitionValueModel> values_;
  bool singleton_coalitions_;
  Time t_max_ = 0;
  std::unordered_map<LocationId, std::size_t> location_index_;
};

// Profit multiplier in (0, 1] for working a node at time t.
// Throws std::domain_error when t lies outside [earliest, hard_latest].
double penalty(Time t, const NodeDemand& demand);

struct Complete {
  Time at = 0;
};
struct Incomplete {
  double remaining = 0.0;
};
using CompletionStatus = std::variant<Complete, Incomplete>;

inline bool is_complete(const CompletionStatus& s) {
  return std::holds_alternative<Complete>(s);
}

CompletionStatus completion_status(const NodeVisit& visit,
                                   const Instance& instance);

double visit_score(const NodeVisit& visit, const Instance& instance,
                   Accrual accrual = Accrual::kLiteral);
double score(const Solution& solution, const Instance& instance,
             Accrual accrual = Accrual::kLiteral);

}  // namespace marsc
