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

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <vector>

#include "marsc/model.hpp"

namespace marsc {

class SizeRefusal : public std::runtime_error {
 public:
  SizeRefusal(const std::string& what, std::size_t dim, std::size_t cap)
      : std::runtime_error(what), dim_(dim), cap_(cap) {}
  std::size_t dim() const { return dim_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t dim_;
  std::size_t cap_;
};

struct ExactOptions {
  // Refuse instances with |A|*|V|*|L| above this.
  std::size_t dim_cap = 25;
  Accrual accrual = Accrual::kLiteral;
  // Abort (std::runtime_error) once the memo holds this many states.
  std::size_t state_limit = 20'000'000;
};

struct ExactResult {
  Solution solution;
  double score = 0.0;
  std::size_t states = 0;
};

// Exhaustive optimum. Walks time slots 1..t_max and, at every slot, every
// joint choice of (idle | work node v at location l) per agent that the
// feasibility rules admit; states are memoized, so each distinct
// (time, agent positions, node progress) is solved once. Deterministic: among
// optimal schedules it returns the first in enumeration order, where each
// agent tries work options by (node, location) before idling.
ExactResult solve_exact(const Instance& instance, const ExactOptions& options = {});

// Team orienteering problem with time windows.
struct ToptwNode {
  LocationId location = 0;
  double profit = 0.0;
  Time earliest = 0;
  Time latest = 0;
};

struct ToptwInstance {
  std::vector<Location> locations;
  DistanceMode mode = DistanceMode::kGrid;
  double speed = 1.0;  // shared by all agents; travel depends on locations only
  // Includes the start and end depots, which carry zero profit and the window
  // [0, t_max].
  std::vector<ToptwNode> nodes;
  NodeId start_node = 0;
  NodeId end_node = 1;
  Time t_max = 0;
  std::size_t n_agents = 1;

  // Throws std::invalid_argument when the depots or windows are malformed.
  void check() const;
  Time travel_time(LocationId from, LocationId to) const;
  std::vector<NodeId> intermediate_nodes() const;
};

// MARSC instance with unit workloads, unit singleton coalition values,
// no soft latest times, every agent at the start depot, and precedences
// start -> v -> end for every intermediate v.
Instance reduce_toptw(const ToptwInstance& toptw);

// Brute-force optimum of the TOPTW under the time conventions of the reduced
// instance: service takes one slot, a hop l1 -> l2 after service at t needs
// the next service at t' >= t + travel + 1, agents start at the depot at
// time 0, one agent opens the start depot at t = 1 and customers are served
// no earlier than t = 2. Routes are open: the end depot is never required.
// Throws SizeRefusal beyond 8 intermediate nodes or 3 agents.
double toptw_oracle(const ToptwInstance& toptw);

// Reads the classic column layout (one node per line:
// id x y service profit open close), first row is the depot. Coordinates use
// the taxicab metric. Lines starting with '#' and blank lines are skipped.
ToptwInstance parse_toptw_columns(std::istream& in, std::size_t n_agents);

}  // namespace marsc
