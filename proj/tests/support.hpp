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

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the code paths it is used to check, except where noted.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "marsc/bnt.hpp"
#include "marsc/exact.hpp"
#include "marsc/feasibility.hpp"
#include "marsc/model.hpp"
#include "marsc/values.hpp"

namespace marsc::testing {

inline std::shared_ptr<const CoalitionValueModel> superadditive(std::size_t n) {
  return std::make_shared<CoalitionValueModel>(ValueKind::kSuperadditive, 0, n);
}

// Grid instance with one location per id, agents and nodes placed by hand.
struct Builder {
  std::vector<Location> locations;
  std::vector<Agent> agents;
  std::vector<NodeDemand> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  bool singleton = false;
  ValueKind kind = ValueKind::kSuperadditive;
  std::uint64_t seed = 0;

  LocationId loc(double x, double y) {
    const auto id = static_cast<LocationId>(locations.size());
    locations.push_back({id, x, y});
    return id;
  }
  AgentId agent(LocationId at, double speed = 1.0) {
    const auto id = static_cast<AgentId>(agents.size());
    agents.push_back({id, at, speed});
    return id;
  }
  NodeId node(LocationId at, double w, double phi, Time alpha, Time beta, Time gamma) {
    nodes.emplace_back(std::vector<LocationId>{at}, w, phi, alpha, beta, gamma);
    return static_cast<NodeId>(nodes.size() - 1);
  }
  Instance build() const {
    return Instance(locations, agents, nodes, PrecedenceDag(nodes.size(), edges),
                    TravelModel(DistanceMode::kGrid),
                    std::make_shared<CoalitionValueModel>(kind, seed, agents.size()), singleton);
  }
};

struct GridSpec {
  std::size_t agents = 2;
  std::size_t nodes = 2;
  std::size_t locations = 4;  // distinct grid points shared by agents and nodes
  int grid = 3;
  Time max_alpha = 3;
  Time min_span = 2;
  Time max_span = 6;
  int max_workload = 3;
  int max_locations_per_node = 1;
  double precedence_prob = 0.3;
  ValueKind kind = ValueKind::kSuperadditive;
  bool singleton = false;
};

// Small random grid instance with integer workloads and profits, chain
// precedences, and |L| = spec.locations.
inline Instance make_grid_instance(std::uint64_t seed, const GridSpec& spec) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](auto lo, auto hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  std::vector<Location> locations;
  std::set<std::pair<int, int>> used;
  while (locations.size() < spec.locations) {
    const int x = static_cast<int>(pick(0, spec.grid));
    const int y = static_cast<int>(pick(0, spec.grid));
    if (!used.insert({x, y}).second) continue;
    locations.push_back({static_cast<LocationId>(locations.size()), double(x), double(y)});
  }
  std::vector<Agent> agents;
  for (AgentId a = 0; a < spec.agents; ++a) {
    agents.push_back({a, static_cast<LocationId>(pick(0, spec.locations - 1)), 1.0});
  }
  std::vector<NodeDemand> nodes;
  for (std::size_t v = 0; v < spec.nodes; ++v) {
    const auto count = pick(1, spec.max_locations_per_node);
    std::set<LocationId> ls;
    while (static_cast<std::int64_t>(ls.size()) < count) {
      ls.insert(static_cast<LocationId>(pick(0, spec.locations - 1)));
    }
    const Time alpha = pick(0, spec.max_alpha);
    const Time gamma = alpha + pick(spec.min_span, spec.max_span);
    const Time beta = pick(alpha, gamma);
    const double w = static_cast<double>(pick(1, spec.max_workload));
    const double phi = static_cast<double>(pick(1, 3));
    nodes.emplace_back(std::vector<LocationId>(ls.begin(), ls.end()), w, phi, alpha, beta, gamma);
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::bernoulli_distribution coin(spec.precedence_prob);
  for (NodeId v = 0; v + 1 < spec.nodes; ++v) {
    if (coin(rng)) edges.emplace_back(v, v + 1);
  }
  return Instance(std::move(locations), std::move(agents), std::move(nodes),
                  PrecedenceDag(spec.nodes, std::move(edges)), TravelModel(DistanceMode::kGrid),
                  std::make_shared<CoalitionValueModel>(spec.kind, seed ^ 0x5eedULL, spec.agents),
                  spec.singleton);
}

// Great-circle distance written out independently of the library.
inline double haversine_meters(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kR = 6371000.0;
  const double rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * rad;
  const double dlon = (lon2 - lon1) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kR * std::asin(std::min(1.0, std::sqrt(h)));
}

// Re-checks a solution through an explicit table of decision variables
// x[v][l][t][C] = 1 and y[v][l] = 1, constraint by constraint. Returns the
// names of the broken constraints (empty when feasible). Visits with no
// entries are not representable and must not be passed in.
inline std::vector<std::string> table_violations(const Solution& solution,
                                                 const Instance& instance) {
  using Key = std::tuple<NodeId, LocationId, Time>;
  std::map<Key, std::vector<Coalition>> x;
  std::map<NodeId, std::set<LocationId>> y;
  std::vector<std::string> broken;
  const std::size_t n = instance.agent_count();

  for (const auto& visit : solution.visits) {
    for (const auto& e : visit.entries) {
      x[{visit.node, visit.location, e.time}].push_back(e.coalition);
      y[visit.node].insert(visit.location);
    }
  }
  // Domains of the variables.
  for (const auto& [key, cs] : x) {
    const auto& [v, l, t] = key;
    if (v >= instance.node_count()) {
      broken.push_back("domain:node");
      continue;
    }
    const auto& d = instance.node(v);
    const auto& ls = d.locations();
    if (std::find(ls.begin(), ls.end(), l) == ls.end()) broken.push_back("domain:location");
    if (t < d.earliest() || t > d.hard_latest()) broken.push_back("domain:time");
    for (const auto& c : cs) {
      if (c.empty()) broken.push_back("domain:empty");
      for (AgentId a : c.members()) {
        if (a >= n) broken.push_back("domain:agent");
      }
      if (instance.singleton_coalitions() && c.size() > 1) broken.push_back("domain:singleton");
    }
    // At most one coalition per (v, l, t).
    if (cs.size() > 1) broken.push_back("one-coalition");
  }
  if (!broken.empty()) return broken;

  // At most one location per node.
  for (const auto& [v, ls] : y) {
    if (ls.size() > 1) broken.push_back("one-location");
  }

  // Workload reached (inequality form) and no work after completion.
  std::map<NodeId, Time> completed;
  for (const auto& [v, ls] : y) {
    const auto& d = instance.node(v);
    double acc = 0.0;
    std::optional<Time> done;
    for (const auto& [key, cs] : x) {
      if (std::get<0>(key) != v) continue;
      if (done) {
        broken.push_back("work-after-completion");
        break;
      }
      acc += instance.value(cs.front(), v, std::get<1>(key));
      if (acc >= d.workload() - 1e-9) done = std::get<2>(key);
    }
    if (!done) {
      broken.push_back("incomplete");
    } else {
      completed[v] = *done;
    }
  }

  // Travel feasibility along each agent's engagement chain, starting with the start
  // location at time 0.
  for (AgentId a = 0; a < n; ++a) {
    std::vector<std::tuple<Time, NodeId, LocationId>> chain;
    for (const auto& [key, cs] : x) {
      for (const auto& c : cs) {
        if (c.contains(a)) chain.emplace_back(std::get<2>(key), std::get<0>(key), std::get<1>(key));
      }
    }
    std::sort(chain.begin(), chain.end());
    Time t1 = 0;
    LocationId l1 = instance.agent(a).initial_location;
    std::optional<std::pair<NodeId, LocationId>> p1;
    for (const auto& [t2, v2, l2] : chain) {
      const bool same_place = p1 && p1->first == v2 && p1->second == l2;
      if (t2 == t1 && p1) {
        broken.push_back("simultaneous");
      } else if (!same_place && t2 < t1 + instance.travel_time(a, l1, l2) + 1) {
        broken.push_back(p1 ? "travel" : "first-arrival");
      }
      t1 = t2;
      l1 = l2;
      p1 = std::make_pair(v2, l2);
    }
  }

  // Precedence, dynamic form.
  for (const auto& [v1, v2] : instance.precedence().edges()) {
    const auto& d1 = instance.node(v1);
    const auto& d2 = instance.node(v2);
    if (d2.earliest() > d1.hard_latest()) continue;
    for (const auto& [key, cs] : x) {
      if (std::get<0>(key) != v2) continue;
      const Time t = std::get<2>(key);
      if (t > d1.hard_latest()) continue;
      auto it = completed.find(v1);
      if (it == completed.end() || it->second >= t) {
        broken.push_back("precedence");
        break;
      }
    }
  }
  return broken;
}

// Best score over every joint schedule of per-agent actions (idle or work at
// some (node, location)) on slots 1..t_max, keeping the schedules the
// validator accepts. Exponential; only for a handful of slots.
inline double brute_force_optimum(const Instance& instance, Accrual accrual) {
  std::vector<std::pair<NodeId, LocationId>> places;
  for (NodeId v = 0; v < instance.node_count(); ++v) {
    for (LocationId l : instance.node(v).locations()) places.emplace_back(v, l);
  }
  const std::size_t n = instance.agent_count();
  const Time horizon = instance.t_max();
  const std::size_t per_slot = places.size() + 1;
  const std::size_t cells = n * static_cast<std::size_t>(horizon);
  std::vector<std::size_t> pick(cells, 0);
  double best = 0.0;
  while (true) {
    std::map<NodeId, NodeVisit> visits;
    bool representable = true;
    for (Time t = 1; t <= horizon && representable; ++t) {
      std::map<std::pair<NodeId, LocationId>, Coalition> here;
      for (AgentId a = 0; a < n; ++a) {
        const std::size_t c = pick[static_cast<std::size_t>(t - 1) * n + a];
        if (c == 0) continue;
        here[places[c - 1]].insert(a);
      }
      for (const auto& [place, coalition] : here) {
        auto [it, fresh] = visits.try_emplace(place.first);
        if (fresh) {
          it->second.node = place.first;
          it->second.location = place.second;
        } else if (it->second.location != place.second) {
          representable = false;
        }
        it->second.entries.push_back({t, coalition});
      }
    }
    if (representable) {
      Solution s;
      for (auto& [v, visit] : visits) s.visits.push_back(visit);
      if (validate(s, instance).feasible()) best = std::max(best, score(s, instance, accrual));
    }
    std::size_t i = 0;
    while (i < cells && ++pick[i] == per_slot) pick[i++] = 0;
    if (i == cells) break;
  }
  return best;
}

// Greedy construction that, at each step, commits the first node of `order`
// with a positive-score singleton solution. Mirrors the step structure of BNT
// (including the release of unservable nodes, evaluated in sort_nodes
// order) but replaces the argmax with a fixed preference order.
inline double ordered_greedy(const Instance& instance, const std::vector<NodeId>& order,
                             const BntOptions& options) {
  SearchState state(instance);
  const auto sweep = sort_nodes(instance);
  while (true) {
    for (bool again = true; again;) {
      again = false;
      for (NodeId v : sweep) {
        if (!state.pending(v)) continue;
        if (!best_singleton(state, v, options) && options.proximity_filter &&
            state.claiming(v)) {
          state.release(v);
          again = true;
        }
      }
    }
    bool committed = false;
    for (NodeId v : order) {
      if (!state.pending(v)) continue;
      auto s = best_singleton(state, v, options);
      if (s && s->score > 0.0) {
        state.commit(*s);
        committed = true;
        break;
      }
    }
    if (!committed) break;
  }
  return score(state.partial(), instance, options.accrual);
}

// Best ordered_greedy score over every permutation of the nodes.
inline double best_over_orderings(const Instance& instance, const BntOptions& options) {
  std::vector<NodeId> order(instance.node_count());
  for (NodeId v = 0; v < order.size(); ++v) order[v] = v;
  double best = 0.0;
  do {
    best = std::max(best, ordered_greedy(instance, order, options));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

// Random grid TOPTW instance: depot plus `intermediates` customers on a
// 5x5 grid, integer windows inside [0, t_max].
inline ToptwInstance make_toptw(std::uint64_t seed, std::size_t intermediates,
                                std::size_t agents) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  ToptwInstance t;
  t.n_agents = agents;
  t.t_max = pick(8, 14);
  t.locations.push_back({0, double(pick(0, 4)), double(pick(0, 4))});
  t.nodes.push_back({0, 0.0, 0, t.t_max});
  t.nodes.push_back({0, 0.0, 0, t.t_max});
  t.start_node = 0;
  t.end_node = 1;
  for (std::size_t i = 0; i < intermediates; ++i) {
    const auto id = static_cast<LocationId>(t.locations.size());
    t.locations.push_back({id, double(pick(0, 4)), double(pick(0, 4))});
    const Time open = pick(0, t.t_max - 2);
    const Time close = pick(open + 1, t.t_max);
    t.nodes.push_back({id, double(pick(1, 5)), open, close});
  }
  return t;
}

}  // namespace marsc::testing
