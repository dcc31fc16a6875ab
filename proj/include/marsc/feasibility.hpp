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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "marsc/model.hpp"

namespace marsc {

enum class ConstraintFamily { kStructural, kTemporal, kSpatial, kOrdering };

std::string to_string(ConstraintFamily family);

struct Violation {
  ConstraintFamily family = ConstraintFamily::kStructural;
  std::vector<NodeId> nodes;
  std::vector<AgentId> agents;
  Time time = 0;
  std::string detail;
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  std::size_t size() const { return violations.size(); }
  std::size_t count(ConstraintFamily family) const;
  void append(ViolationReport other);
};

// One coalition per (node, location, time) and window membership; also
// malformed coalitions and locations.
ViolationReport check_structural(const Solution& solution, const Instance& instance);
// One location per node, workload completed, no work after completion.
ViolationReport check_temporal(const Solution& solution, const Instance& instance);
// Reachability from the start location, travel between consecutive
// engagements, and no agent in two places at once.
ViolationReport check_spatial(const Solution& solution, const Instance& instance);
// Successors are not worked inside the overlap window until the predecessor
// has been completed.
ViolationReport check_ordering(const Solution& solution, const Instance& instance);
// All four families, sorted by (node, time, family).
ViolationReport validate(const Solution& solution, const Instance& instance);

// Single-step predicates shared by the validator and the solvers that build
// schedules incrementally.
namespace rules {

// First time slot at which agent `a`, last engaged at `from` at time `last`,
// may work at `to`. An agent's start counts as an engagement at time 0 at its
// initial location, so one rule covers both the first arrival and later moves.
Time earliest_slot(const Instance& instance, AgentId a, LocationId from,
                   Time last, LocationId to);

// Whether node `v` may be worked at time `t` given the completion times known
// so far (nullopt for nodes not yet completed).
bool ordering_allows(const Instance& instance, NodeId v, Time t,
                     std::span<const std::optional<Time>> completion);

// Smallest t >= lower at which ordering_allows holds for the given completion
// times; nullopt when no such t exists within the node window.
std::optional<Time> ordering_earliest(const Instance& instance, NodeId v, Time lower,
                                      std::span<const std::optional<Time>> completion);

}  // namespace rules

}  // namespace marsc
