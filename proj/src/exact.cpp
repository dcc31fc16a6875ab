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

#include "marsc/exact.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>

#include "marsc/feasibility.hpp"
#include "marsc/values.hpp"

namespace marsc {
namespace {

constexpr double kDead = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kUntouched = -1;
constexpr std::int64_t kDone = -2;

struct AgentSlot {
  LocationId location;
  Time last;
};

struct NodeSlot {
  std::int64_t status = kUntouched;  // kUntouched, kDone, or the location id
  double done = 0.0;
};

struct State {
  Time t = 1;
  std::vector<AgentSlot> agents;
  std::vector<NodeSlot> nodes;
};

struct Option {
  NodeId node;
  LocationId location;
};

// One agent's choice at a slot; nullopt means idle.
using Action = std::optional<Option>;

class ExactSearch {
 public:
  ExactSearch(const Instance& instance, const ExactOptions& options)
      : instance_(instance), options_(options) {
    // Beyond this many slots since the last engagement, every location is
    // already reachable; clipping the gap keeps equivalent states identical.
    for (AgentId a = 0; a < instance.agent_count(); ++a) {
      for (const auto& from : instance.locations()) {
        Time worst = 0;
        for (const auto& to : instance.locations()) {
          worst = std::max(worst, instance.travel_time(a, from.id, to.id));
        }
        horizon_[{a, from.id}] = worst + 1;
      }
    }
  }

  double solve(const State& s) {
    if (s.t > instance_.t_max()) return terminal(s);
    const std::string key = encode(s);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= options_.state_limit) {
      throw std::runtime_error("exact search exceeded its state limit of " +
                               std::to_string(options_.state_limit));
    }
    double best = kDead;
    for_each_transition(s, [&](double gain, const State& next, const auto&) {
      const double future = solve(next);
      if (future == kDead) return false;
      best = std::max(best, gain + future);
      return false;
    });
    memo_.emplace(key, best);
    return best;
  }

  // Replays the optimal path from `root` and records its work entries.
  Solution reconstruct(State s, double target) {
    std::map<NodeId, NodeVisit> visits;
    while (s.t <= instance_.t_max()) {
      bool moved = false;
      for_each_transition(s, [&](double gain, const State& next,
                                 const std::vector<std::pair<Option, Coalition>>& work) {
        const double future = solve(next);
        if (future == kDead || gain + future != target) return false;
        for (const auto& [opt, coalition] : work) {
          auto& visit = visits[opt.node];
          visit.node = opt.node;
          visit.location = opt.location;
          visit.entries.push_back({s.t, coalition});
        }
        target = future;
        s = next;
        moved = true;
        return true;
      });
      if (!moved) throw std::logic_error("exact reconstruction lost the optimal path");
    }
    Solution out;
    for (auto& [node, visit] : visits) out.visits.push_back(std::move(visit));
    return out;
  }

  std::size_t states() const { return memo_.size(); }

 private:
  double terminal(const State& s) const {
    for (const auto& n : s.nodes) {
      if (n.status >= 0) return kDead;
    }
    return 0.0;
  }

  std::string encode(const State& s) const {
    std::string key;
    key.reserve(8 * (1 + 2 * s.agents.size() + 2 * s.nodes.size()));
    auto put = [&key](std::int64_t x) {
      key.append(reinterpret_cast<const char*>(&x), sizeof x);
    };
    put(s.t);
    for (AgentId a = 0; a < s.agents.size(); ++a) {
      const auto& slot = s.agents[a];
      put(slot.location);
      put(std::min<Time>(s.t - slot.last, horizon_.at({a, slot.location})));
    }
    for (const auto& n : s.nodes) {
      put(n.status);
      if (n.status >= 0) put(std::bit_cast<std::int64_t>(n.done));
    }
    return key;
  }

  std::vector<Action> options_for(const State& s, AgentId a,
                                  std::span<const std::optional<Time>> completion) const {
    std::vector<Action> out;
    const AgentSlot& slot = s.agents[a];
    for (NodeId v = 0; v < instance_.node_count(); ++v) {
      const NodeDemand& demand = instance_.node(v);
      const NodeSlot& n = s.nodes[v];
      if (n.status == kDone || !demand.in_window(s.t)) continue;
      if (!rules::ordering_allows(instance_, v, s.t, completion)) continue;
      std::vector<LocationId> locations = demand.locations();
      std::sort(locations.begin(), locations.end());
      for (LocationId l : locations) {
        if (n.status >= 0 && static_cast<LocationId>(n.status) != l) continue;
        if (rules::earliest_slot(instance_, a, slot.location, slot.last, l) > s.t) continue;
        out.push_back(Option{v, l});
      }
    }
    out.push_back(std::nullopt);
    return out;
  }

  // Calls fn(gain, next_state, work) for each admissible joint action, in
  // enumeration order, until fn returns true.
  template <typename Fn>
  void for_each_transition(const State& s, Fn&& fn) {
    std::vector<std::optional<Time>> completion(instance_.node_count());
    for (NodeId v = 0; v < instance_.node_count(); ++v) {
      // Any completion recorded in an earlier slot is strictly before s.t.
      if (s.nodes[v].status == kDone) completion[v] = s.t - 1;
    }
    const std::size_t n = instance_.agent_count();
    std::vector<std::vector<Action>> choices(n);
    for (AgentId a = 0; a < n; ++a) choices[a] = options_for(s, a, completion);

    std::vector<std::size_t> pick(n, 0);
    while (true) {
      if (auto result = apply(s, choices, pick)) {
        if (fn(result->gain, result->next, result->work)) return;
      }
      // Odometer over agents, last agent fastest.
      bool advanced = false;
      for (std::size_t i = n; i-- > 0;) {
        if (++pick[i] < choices[i].size()) {
          advanced = true;
          break;
        }
        pick[i] = 0;
      }
      if (!advanced) return;
    }
  }

  struct Transition {
    double gain = 0.0;
    State next;
    std::vector<std::pair<Option, Coalition>> work;
  };

  std::optional<Transition> apply(const State& s, const std::vector<std::vector<Action>>& choices,
                                  const std::vector<std::size_t>& pick) const {
    std::map<NodeId, std::pair<LocationId, Coalition>> groups;
    for (AgentId a = 0; a < pick.size(); ++a) {
      const Action& act = choices[a][pick[a]];
      if (!act) continue;
      auto [it, fresh] = groups.try_emplace(act->node, act->location, Coalition{});
      if (!fresh && it->second.first != act->location) return std::nullopt;
      it->second.second.insert(a);
    }
    Transition out;
    out.next = s;
    out.next.t = s.t + 1;
    for (auto& [v, group] : groups) {
      auto& [l, coalition] = group;
      if (instance_.singleton_coalitions() && coalition.size() > 1) return std::nullopt;
      const NodeDemand& demand = instance_.node(v);
      NodeSlot& slot = out.next.nodes[v];
      slot.status = l;
      slot.done += instance_.value(coalition, v, l);
      const double worth = demand.profit() * penalty(s.t, demand);
      if (slot.done >= demand.workload() - kEpsilon) {
        slot.status = kDone;
        slot.done = 0.0;
        if (options_.accrual == Accrual::kCompletion) out.gain += worth;
      }
      if (options_.accrual == Accrual::kLiteral) out.gain += worth;
      for (AgentId a : coalition.members()) out.next.agents[a] = AgentSlot{l, s.t};
      out.work.push_back({Option{v, l}, coalition});
    }
    // A started node that can no longer be worked is a dead end.
    for (NodeId v = 0; v < instance_.node_count(); ++v) {
      const NodeSlot& slot = out.next.nodes[v];
      if (slot.status >= 0 && instance_.node(v).hard_latest() < out.next.t) return std::nullopt;
    }
    return out;
  }

  const Instance& instance_;
  const ExactOptions& options_;
  std::map<std::pair<AgentId, LocationId>, Time> horizon_;
  std::unordered_map<std::string, double> memo_;
};

}  // namespace

ExactResult solve_exact(const Instance& instance, const ExactOptions& options) {
  const std::size_t dim = instance.dim();
  if (dim > options.dim_cap) {
    throw SizeRefusal("exact solver refuses dim=" + std::to_string(dim) + " above cap " +
                          std::to_string(options.dim_cap),
                      dim, options.dim_cap);
  }
  const auto started = std::chrono::steady_clock::now();
  ExactResult result;
  if (instance.node_count() == 0) {
    result.solution.metadata.solver = "exact";
    return result;
  }

  State root;
  root.t = 1;
  for (const auto& agent : instance.agents()) {
    root.agents.push_back(AgentSlot{agent.initial_location, 0});
  }
  root.nodes.resize(instance.node_count());

  ExactSearch search(instance, options);
  const double best = search.solve(root);
  if (best == kDead) throw std::logic_error("exact search found no schedule, not even empty");
  result.solution = search.reconstruct(root, best);
  result.score = score(result.solution, instance, options.accrual);
  result.states = search.states();
  result.solution.metadata.solver = "exact";
  result.solution.metadata.traversals = result.states;
  result.solution.metadata.wall_millis = std::chrono::duration<double, std::milli>(
                                             std::chrono::steady_clock::now() - started)
                                             .count();
  return result;
}

void ToptwInstance::check() const {
  if (n_agents == 0) throw std::invalid_argument("TOPTW needs at least one agent");
  if (start_node >= nodes.size() || end_node >= nodes.size() || start_node == end_node) {
    throw std::invalid_argument("TOPTW start/end depots are malformed");
  }
  if (!(speed > 0.0)) throw std::invalid_argument("TOPTW speed must be > 0");
  for (NodeId v : {start_node, end_node}) {
    const auto& depot = nodes[v];
    if (depot.profit != 0.0 || depot.earliest != 0 || depot.latest != t_max) {
      throw std::invalid_argument("TOPTW depots need zero profit and window [0, t_max]");
    }
  }
  for (const auto& node : nodes) {
    if (node.profit < 0.0 || node.earliest < 0 || node.earliest > node.latest ||
        node.latest > t_max) {
      throw std::invalid_argument("TOPTW node window or profit out of range");
    }
    bool known = false;
    for (const auto& loc : locations) known = known || loc.id == node.location;
    if (!known) throw std::invalid_argument("TOPTW node references unknown location");
  }
}

Time ToptwInstance::travel_time(LocationId from, LocationId to) const {
  const Location* a = nullptr;
  const Location* b = nullptr;
  for (const auto& loc : locations) {
    if (loc.id == from) a = &loc;
    if (loc.id == to) b = &loc;
  }
  if (!a || !b) throw std::out_of_range("TOPTW location lookup failed");
  return TravelModel(mode).travel_time(Agent{0, from, speed}, *a, *b);
}

std::vector<NodeId> ToptwInstance::intermediate_nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < nodes.size(); ++v) {
    if (v != start_node && v != end_node) out.push_back(v);
  }
  return out;
}

Instance reduce_toptw(const ToptwInstance& toptw) {
  toptw.check();
  const LocationId depot = toptw.nodes[toptw.start_node].location;
  std::vector<Agent> agents;
  for (AgentId a = 0; a < toptw.n_agents; ++a) agents.push_back(Agent{a, depot, toptw.speed});

  std::vector<NodeDemand> nodes;
  for (const auto& node : toptw.nodes) {
    nodes.emplace_back(std::vector<LocationId>{node.location}, 1.0, node.profit, node.earliest,
                       node.latest, node.latest);
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  const auto middle = toptw.intermediate_nodes();
  if (middle.empty()) {
    edges.emplace_back(toptw.start_node, toptw.end_node);
  } else {
    for (NodeId v : middle) edges.emplace_back(toptw.start_node, v);
    for (NodeId v : middle) edges.emplace_back(v, toptw.end_node);
  }
  // Superadditive values on singleton coalitions are identically 1.
  auto values = std::make_shared<CoalitionValueModel>(ValueKind::kSuperadditive, 0,
                                                      toptw.n_agents);
  return Instance(toptw.locations, std::move(agents), std::move(nodes),
                  PrecedenceDag(toptw.nodes.size(), std::move(edges)), TravelModel(toptw.mode),
                  std::move(values), /*singleton_coalitions=*/true);
}

double toptw_oracle(const ToptwInstance& toptw) {
  toptw.check();
  const auto middle = toptw.intermediate_nodes();
  if (middle.size() > 8 || toptw.n_agents > 3) {
    throw SizeRefusal("TOPTW oracle is limited to 8 nodes and 3 agents",
                      middle.size() * toptw.n_agents, 8 * 3);
  }
  const LocationId depot = toptw.nodes[toptw.start_node].location;
  const std::size_t k = middle.size();
  std::vector<std::vector<Time>> hop(k + 1, std::vector<Time>(k + 1));
  auto loc_of = [&](std::size_t i) { return i == k ? depot : toptw.nodes[middle[i]].location; };
  for (std::size_t i = 0; i <= k; ++i) {
    for (std::size_t j = 0; j <= k; ++j) hop[i][j] = toptw.travel_time(loc_of(i), loc_of(j));
  }

  double best = 0.0;
  std::vector<char> used(k, 0);
  // Extends agent `a`'s route from (position, last service time); when the
  // route ends, moves on to the next agent.
  std::function<void(std::size_t, std::size_t, Time, double, std::size_t)> extend =
      [&](std::size_t a, std::size_t at, Time last, double profit, std::size_t opener) {
        best = std::max(best, profit);
        for (std::size_t i = 0; i < k; ++i) {
          if (used[i]) continue;
          const ToptwNode& node = toptw.nodes[middle[i]];
          const Time t = std::max({last + hop[at][i] + 1, node.earliest, Time{2}});
          if (t > node.latest) continue;
          used[i] = 1;
          extend(a, i, t, profit + node.profit, opener);
          used[i] = 0;
        }
        if (a + 1 < toptw.n_agents) {
          extend(a + 1, k, a + 1 == opener ? 1 : 0, profit, opener);
        }
      };
  for (std::size_t opener = 0; opener < toptw.n_agents; ++opener) {
    extend(0, k, opener == 0 ? 1 : 0, 0.0, opener);
  }
  return best;
}

ToptwInstance parse_toptw_columns(std::istream& in, std::size_t n_agents) {
  ToptwInstance out;
  out.n_agents = n_agents;
  out.mode = DistanceMode::kGrid;
  std::string line;
  std::size_t line_no = 0;
  bool depot_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double id = 0, x = 0, y = 0, service = 0, profit = 0, open = 0, close = 0;
    if (!(row >> id >> x >> y >> service >> profit >> open >> close)) {
      throw std::invalid_argument("TOPTW line " + std::to_string(line_no) +
                                  ": expected 7 numeric columns");
    }
    const auto loc_id = static_cast<LocationId>(out.locations.size());
    out.locations.push_back(Location{loc_id, x, y});
    const Time lo = static_cast<Time>(std::ceil(open));
    const Time hi = static_cast<Time>(std::floor(close));
    if (!depot_seen) {
      depot_seen = true;
      out.t_max = hi;
      out.nodes.push_back(ToptwNode{loc_id, 0.0, 0, hi});
      out.nodes.push_back(ToptwNode{loc_id, 0.0, 0, hi});
      out.start_node = 0;
      out.end_node = 1;
      continue;
    }
    out.nodes.push_back(ToptwNode{loc_id, profit, lo, std::min(hi, out.t_max)});
  }
  if (!depot_seen) throw std::invalid_argument("TOPTW file has no depot row");
  out.check();
  return out;
}

}  // namespace marsc
