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

#include "marsc/bnt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <tuple>

#include "marsc/feasibility.hpp"
#include "marsc/values.hpp"

namespace marsc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Plan {
  std::size_t members = 0;
  Time completion = 0;
  double score = 0.0;
};

struct NoSink {
  void operator()(Time, const Coalition&) const {}
};

// Simulates the staggered schedule of the first `k` candidates. The sink sees
// every work entry in time order; planning and materializing share this loop
// so their arithmetic is identical.
template <typename Sink>
std::optional<Plan> simulate_prefix(const Instance& instance, NodeId v, LocationId l,
                                    std::span<const Candidate> candidates, std::size_t k,
                                    Accrual accrual, Sink&& sink) {
  const NodeDemand& demand = instance.node(v);
  const double target = demand.workload() - kEpsilon;
  Coalition coalition;
  double rate = 0.0;
  double done = 0.0;
  double total = 0.0;
  std::size_t joined = 0;
  for (Time t = candidates[0].start; t <= demand.hard_latest(); ++t) {
    bool changed = false;
    while (joined < k && candidates[joined].start <= t) {
      coalition.insert(candidates[joined].agent);
      ++joined;
      changed = true;
    }
    if (changed) rate = instance.value(coalition, v, l);
    if (rate <= 0.0 && joined == k && target > 0.0) return std::nullopt;
    sink(t, coalition);
    done += rate;
    if (accrual == Accrual::kLiteral) total += demand.profit() * penalty(t, demand);
    if (done >= target) {
      if (accrual == Accrual::kCompletion) total = demand.profit() * penalty(t, demand);
      return Plan{joined, t, total};
    }
  }
  return std::nullopt;
}

std::optional<Plan> plan_coalition(const Instance& instance, NodeId v, LocationId l,
                                   std::span<const Candidate> candidates, Accrual accrual) {
  if (candidates.empty()) return std::nullopt;
  const std::size_t limit = instance.singleton_coalitions() ? 1 : candidates.size();
  for (std::size_t k = 1; k <= limit; ++k) {
    if (auto plan = simulate_prefix(instance, v, l, candidates, k, accrual, NoSink{})) {
      return plan;
    }
  }
  return std::nullopt;
}

SingletonSolution materialize(const Instance& instance, NodeId v, LocationId l,
                              std::span<const Candidate> candidates, const Plan& plan,
                              Accrual accrual) {
  SingletonSolution out;
  out.visit.node = v;
  out.visit.location = l;
  auto sink = [&out](Time t, const Coalition& c) { out.visit.entries.push_back({t, c}); };
  auto again = simulate_prefix(instance, v, l, candidates, plan.members, accrual, sink);
  if (!again) throw std::logic_error("coalition plan did not replay");
  out.completion = again->completion;
  out.score = again->score;
  out.coalition_size = again->members;
  return out;
}

struct Choice {
  NodeId node = 0;
  LocationId location = 0;
  std::vector<Candidate> candidates;
  Plan plan;
};

// Strictly better score wins; equal scores (within tolerance) go to the
// smaller (node, location).
bool better(double score, NodeId v, LocationId l, const Choice& incumbent) {
  if (score > incumbent.plan.score + kEpsilon) return true;
  if (score < incumbent.plan.score - kEpsilon) return false;
  return std::tie(v, l) < std::tie(incumbent.node, incumbent.location);
}

std::optional<Choice> best_choice(const SearchState& state, NodeId v, const BntOptions& options,
                                  std::optional<Choice> incumbent) {
  const Instance& instance = state.instance();
  std::vector<LocationId> locations = instance.node(v).locations();
  std::sort(locations.begin(), locations.end());
  for (LocationId l : locations) {
    auto candidates = candidate_agents(state, v, l, options);
    auto plan = plan_coalition(instance, v, l, candidates, options.accrual);
    if (!plan) continue;
    if (!incumbent || better(plan->score, v, l, *incumbent)) {
      incumbent = Choice{v, l, std::move(candidates), *plan};
    }
  }
  return incumbent;
}

std::uint64_t extend_prefix(std::uint64_t prefix, NodeId v) {
  return hash_combine64(prefix, std::uint64_t{v} + 1);
}

constexpr std::uint64_t kRootPrefix = 0x6d61727363ULL;

struct TraversalKey {
  std::uint64_t prefix;
  NodeId node;
  friend bool operator==(const TraversalKey&, const TraversalKey&) = default;
};

struct TraversalKeyHash {
  std::size_t operator()(const TraversalKey& k) const {
    return static_cast<std::size_t>(hash_combine64(k.prefix, k.node));
  }
};

using TraversalSet = std::unordered_set<TraversalKey, TraversalKeyHash>;

struct StepRecord {
  std::uint64_t prefix;
  NodeId chosen;
  std::vector<NodeId> viable;  // nodes with a positive-score singleton at this step
};

struct RunResult {
  Solution solution;
  std::vector<StepRecord> steps;
};

RunResult run_bnt(const Instance& instance, const BntOptions& options,
                  const TraversalSet* forbidden) {
  const auto started = std::chrono::steady_clock::now();
  SearchState state(instance);
  const std::vector<NodeId> order = sort_nodes(instance);
  RunResult result;
  std::uint64_t prefix = kRootPrefix;

  for (std::size_t step = 0; step < instance.node_count(); ++step) {
    if (options.max_steps && step >= *options.max_steps) break;
    if (options.budget && std::chrono::steady_clock::now() - started >= *options.budget) break;

    std::optional<Choice> best;
    StepRecord record{prefix, 0, {}};
    for (NodeId v : order) {
      if (state.pending(v) && !(forbidden && forbidden->contains({prefix, v}))) {
        ++state.traversal_count;
      }
    }
    // Evaluate every pending node; a claiming node that turns out unservable
    // is released and the step is evaluated again, since releasing it may
    // widen other nodes' candidate sets. Ends after at most |V| rounds.
    for (bool again = true; again;) {
      again = false;
      best.reset();
      record.viable.clear();
      for (NodeId v : order) {
        if (!state.pending(v)) continue;
        std::optional<Choice> here = best_choice(state, v, options, std::nullopt);
        if (!here) {
          if (options.proximity_filter && state.claiming(v)) {
            state.release(v);
            again = true;
          }
          continue;
        }
        if (forbidden && forbidden->contains({prefix, v})) continue;
        if (forbidden && here->plan.score > 0.0) record.viable.push_back(v);
        if (!best || here->plan.score > best->plan.score + kEpsilon) best = std::move(here);
      }
    }
    if (!best || best->plan.score <= 0.0) break;

    SingletonSolution singleton = materialize(instance, best->node, best->location,
                                              best->candidates, best->plan, options.accrual);
    state.commit(singleton);
    record.chosen = best->node;
    result.steps.push_back(std::move(record));
    prefix = extend_prefix(prefix, best->node);
  }

  const auto elapsed = std::chrono::steady_clock::now() - started;
  result.solution = state.take_partial();
  result.solution.metadata.solver = "bnt";
  result.solution.metadata.traversals = state.traversal_count;
  result.solution.metadata.wall_millis =
      std::chrono::duration<double, std::milli>(elapsed).count();
  return result;
}

}  // namespace

SearchState::SearchState(const Instance& instance)
    : instance_(&instance),
      agents_(instance.agent_count()),
      pending_(instance.node_count(), 1),
      claiming_(instance.node_count(), 1),
      completion_(instance.node_count()),
      nearest_cache_(instance.agent_count()) {
  for (AgentId a = 0; a < instance.agent_count(); ++a) {
    agents_[a] = AgentAvailability{0, instance.agent(a).initial_location};
  }
}

void SearchState::set_pending(NodeId v, bool pending) {
  pending_[v] = pending ? 1 : 0;
  claiming_[v] = pending_[v];
  std::fill(nearest_cache_.begin(), nearest_cache_.end(), std::nullopt);
}

void SearchState::release(NodeId v) {
  if (!claiming_[v]) return;
  claiming_[v] = 0;
  std::fill(nearest_cache_.begin(), nearest_cache_.end(), std::nullopt);
}

std::size_t SearchState::pending_count() const {
  return static_cast<std::size_t>(std::count(pending_.begin(), pending_.end(), 1));
}

void SearchState::commit(const SingletonSolution& singleton) {
  const NodeVisit& visit = singleton.visit;
  for (const auto& e : visit.entries) {
    for (AgentId a : e.coalition.members()) {
      auto& avail = agents_[a];
      avail.last_engaged = e.time;
      avail.location = visit.location;
    }
  }
  completion_[visit.node] = singleton.completion;
  partial_.visits.push_back(visit);
  set_pending(visit.node, false);
}

const SearchState::Nearest& SearchState::nearest(AgentId a) const {
  auto& slot = nearest_cache_[a];
  if (slot) return *slot;
  Nearest n{kInf, 0, kInf};
  const AgentAvailability& avail = agents_[a];
  for (NodeId v = 0; v < instance_->node_count(); ++v) {
    if (!claiming_[v]) continue;
    const NodeDemand& demand = instance_->node(v);
    double d = kInf;
    for (LocationId l : demand.locations()) {
      const Time slot_time =
          rules::earliest_slot(*instance_, a, avail.location, avail.last_engaged, l);
      if (slot_time > demand.hard_latest()) continue;
      d = std::min(d, instance_->distance(avail.location, l));
    }
    if (d < n.best) {
      n.second = n.best;
      n.best = d;
      n.best_node = v;
    } else if (d < n.second) {
      n.second = d;
    }
  }
  slot = n;
  return *slot;
}

double SearchState::nearest_other_pending(AgentId a, NodeId exclude) const {
  const Nearest& n = nearest(a);
  if (n.best == kInf) return kInf;
  return n.best_node == exclude ? n.second : n.best;
}

std::vector<NodeId> sort_nodes_by(const Instance& instance,
                                  const std::function<bool(NodeId, NodeId)>& less) {
  const std::size_t m = instance.node_count();
  const PrecedenceDag& dag = instance.precedence();
  std::vector<std::size_t> remaining_preds(m);
  for (NodeId v = 0; v < m; ++v) remaining_preds[v] = dag.predecessors(v).size();
  auto cmp = [&less](NodeId a, NodeId b) {
    if (less(a, b)) return true;
    if (less(b, a)) return false;
    return a < b;
  };
  std::set<NodeId, decltype(cmp)> ready(cmp);
  for (NodeId v = 0; v < m; ++v) {
    if (remaining_preds[v] == 0) ready.insert(v);
  }
  std::vector<NodeId> order;
  order.reserve(m);
  while (!ready.empty()) {
    const NodeId v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (NodeId w : dag.successors(v)) {
      if (--remaining_preds[w] == 0) ready.insert(w);
    }
  }
  if (order.size() != m) throw std::logic_error("precedence cycle while sorting nodes");
  return order;
}

std::vector<NodeId> sort_nodes(const Instance& instance) {
  return sort_nodes_by(instance, [&instance](NodeId a, NodeId b) {
    return instance.node(a).earliest() < instance.node(b).earliest();
  });
}

std::vector<Candidate> candidate_agents(const SearchState& state, NodeId v, LocationId l,
                                        const BntOptions& options) {
  const Instance& instance = state.instance();
  const NodeDemand& demand = instance.node(v);
  std::vector<Candidate> out;
  const auto lower = rules::ordering_earliest(instance, v, demand.earliest(), state.completion());
  if (!lower) return out;
  for (AgentId a = 0; a < instance.agent_count(); ++a) {
    const AgentAvailability& avail = state.agents()[a];
    const Time arrival = avail.last_engaged + instance.travel_time(a, avail.location, l);
    const Time start = std::max(arrival + 1, *lower);
    if (start > demand.hard_latest()) continue;
    if (options.proximity_filter) {
      const double here = instance.distance(avail.location, l);
      if (here > state.nearest_other_pending(a, v) + kEpsilon) continue;
    }
    out.push_back({a, arrival, start});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.arrival, x.agent) < std::tie(y.arrival, y.agent);
  });
  return out;
}

std::optional<SingletonSolution> form_min_coalition(const SearchState& state, NodeId v,
                                                    LocationId l,
                                                    std::span<const Candidate> candidates,
                                                    Accrual accrual) {
  const Instance& instance = state.instance();
  auto plan = plan_coalition(instance, v, l, candidates, accrual);
  if (!plan) return std::nullopt;
  return materialize(instance, v, l, candidates, *plan, accrual);
}

std::optional<SingletonSolution> best_singleton(const SearchState& state, NodeId v,
                                                const BntOptions& options) {
  auto choice = best_choice(state, v, options, std::nullopt);
  if (!choice) return std::nullopt;
  return materialize(state.instance(), choice->node, choice->location, choice->candidates,
                     choice->plan, options.accrual);
}

Solution solve_bnt(const Instance& instance, const BntOptions& options) {
  return run_bnt(instance, options, nullptr).solution;
}

Solution refine(const Instance& instance, std::size_t runs, const BntOptions& options) {
  if (runs == 0) throw std::invalid_argument("refine needs at least one run");
  TraversalSet exhausted;
  std::optional<Solution> best;
  double best_score = 0.0;
  std::uint64_t total_traversals = 0;
  const auto started = std::chrono::steady_clock::now();

  for (std::size_t r = 0; r < runs; ++r) {
    RunResult run = run_bnt(instance, options, &exhausted);
    total_traversals += run.solution.metadata.traversals;
    const double s = score(run.solution, instance, options.accrual);
    if (!best || s > best_score + kEpsilon) {
      best = std::move(run.solution);
      best_score = s;
    }
    if (run.steps.empty()) break;  // every first expansion is exhausted

    // The run ended at a leaf; mark it and every ancestor whose viable
    // children are now all exhausted.
    for (std::size_t i = run.steps.size(); i-- > 0;) {
      const StepRecord& step = run.steps[i];
      exhausted.insert({step.prefix, step.chosen});
      const bool all_done =
          std::all_of(step.viable.begin(), step.viable.end(),
                      [&](NodeId v) { return exhausted.contains({step.prefix, v}); });
      if (!all_done) break;
    }
  }

  const auto elapsed = std::chrono::steady_clock::now() - started;
  best->metadata.solver = "bnt";
  best->metadata.traversals = total_traversals;
  best->metadata.wall_millis = std::chrono::duration<double, std::milli>(elapsed).count();
  return *best;
}

}  // namespace marsc
