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

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "marsc/model.hpp"

namespace marsc {

struct BntOptions {
  // Restrict candidates to agents that are at least as close to the location
  // as to any other pending node they can still reach.
  bool proximity_filter = true;
  Accrual accrual = Accrual::kLiteral;
  // Anytime budget: stop after this many committed steps or this much wall
  // clock, whichever comes first. Unlimited when unset.
  std::optional<std::size_t> max_steps;
  std::optional<std::chrono::milliseconds> budget;
};

struct AgentAvailability {
  // Time of the last work entry; the start state counts as t = 0.
  Time last_engaged = 0;
  LocationId location = 0;

  // First slot the agent can work at its current location.
  Time free_at() const { return last_engaged + 1; }
};

struct Candidate {
  AgentId agent = 0;
  Time arrival = 0;  // time the agent reaches the location
  Time start = 0;    // first slot it may work there

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// A feasible visit of one node, as committed by one BNT/EDF step.
struct SingletonSolution {
  NodeVisit visit;
  Time completion = 0;
  double score = 0.0;
  std::size_t coalition_size = 0;  // size of the full (final) coalition
};

// Bookkeeping for a greedy construction: which nodes are still pending, where
// every agent is, and the partial solution built so far.
class SearchState {
 public:
  explicit SearchState(const Instance& instance);

  const Instance& instance() const { return *instance_; }
  const std::vector<AgentAvailability>& agents() const { return agents_; }
  const std::vector<std::optional<Time>>& completion() const { return completion_; }
  const Solution& partial() const { return partial_; }
  Solution take_partial() { return std::move(partial_); }

  bool pending(NodeId v) const { return pending_[v] != 0; }
  // Clearing pending also clears claiming.
  void set_pending(NodeId v, bool pending);
  std::size_t pending_count() const;

  // A claiming node takes part in the proximity filter. Pending nodes start
  // out claiming; BNT releases a node once no coalition can serve it, so it
  // stops holding on to its nearest agents.
  bool claiming(NodeId v) const { return claiming_[v] != 0; }
  void release(NodeId v);

  // Records the visit, frees its node, and moves every member to the node's
  // location with its last work time.
  void commit(const SingletonSolution& singleton);

  // Distance from the agent's current location to the nearest claiming node
  // other than `exclude` that the agent can still reach before its hard
  // latest time; +inf when there is none.
  double nearest_other_pending(AgentId a, NodeId exclude) const;

  std::uint64_t traversal_count = 0;

 private:
  struct Nearest {
    double best = 0.0;
    NodeId best_node = 0;
    double second = 0.0;
  };
  const Nearest& nearest(AgentId a) const;

  const Instance* instance_;
  std::vector<AgentAvailability> agents_;
  std::vector<char> pending_;
  std::vector<char> claiming_;
  std::vector<std::optional<Time>> completion_;
  Solution partial_;
  mutable std::vector<std::optional<Nearest>> nearest_cache_;
};

// Nodes by nondecreasing earliest time (ties by id), repaired so every
// precedence predecessor comes first.
std::vector<NodeId> sort_nodes(const Instance& instance);

// Same repair for an arbitrary strict weak order over node ids.
std::vector<NodeId> sort_nodes_by(const Instance& instance,
                                  const std::function<bool(NodeId, NodeId)>& less);

// Agents able to start working node v at location l no later than its hard
// latest time, sorted by arrival (ties by agent id).
std::vector<Candidate> candidate_agents(const SearchState& state, NodeId v, LocationId l,
                                        const BntOptions& options = {});

// Grows a coalition from the arrival-sorted candidates, each member starting
// work as soon as it can, and returns the first prefix that completes the
// workload by the hard latest time.
std::optional<SingletonSolution> form_min_coalition(const SearchState& state, NodeId v,
                                                    LocationId l,
                                                    std::span<const Candidate> candidates,
                                                    Accrual accrual = Accrual::kLiteral);

// Best singleton solution for node v over its locations (ties by location id),
// or nullopt if no location admits one. Increments no counters.
std::optional<SingletonSolution> best_singleton(const SearchState& state, NodeId v,
                                                const BntOptions& options);

// Bounded Node Traversal. Each step evaluates every pending node in sort_nodes order and
// keeps the first strictly best singleton solution, so equal scores go to the
// node met first. Stops when no positive-score singleton remains or the
// budget runs out; the partial solution is always feasible.
Solution solve_bnt(const Instance& instance, const BntOptions& options = {});

// Re-executes BNT up to `runs` times, each run steering away from the
// traversal sequences that earlier runs exhausted, and keeps the best score.
Solution refine(const Instance& instance, std::size_t runs, const BntOptions& options = {});

}  // namespace marsc
