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

#include "marsc/feasibility.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace marsc {
namespace {

Violation make(ConstraintFamily family, std::vector<NodeId> nodes,
               std::vector<AgentId> agents, Time time, std::string detail) {
  return Violation{family, std::move(nodes), std::move(agents), time, std::move(detail)};
}

bool node_known(const Instance& instance, NodeId v) { return v < instance.node_count(); }

// Visits that name a valid node and location; malformed ones are reported by
// the structural check and ignored by the others.
bool visit_usable(const NodeVisit& visit, const Instance& instance) {
  return node_known(instance, visit.node) && instance.has_location(visit.location) &&
         instance.node(visit.node).allows_location(visit.location);
}

bool coalition_usable(const Coalition& c, const Instance& instance) {
  if (c.empty()) return false;
  for (AgentId a : c.members()) {
    if (a >= instance.agent_count()) return false;
  }
  return true;
}

// Earliest completion time per node across its usable visits.
std::vector<std::optional<Time>> completion_times(const Solution& solution,
                                                  const Instance& instance) {
  std::vector<std::optional<Time>> out(instance.node_count());
  for (const auto& visit : solution.visits) {
    if (!visit_usable(visit, instance)) continue;
    bool all_ok = true;
    for (const auto& e : visit.entries) all_ok = all_ok && coalition_usable(e.coalition, instance);
    if (!all_ok) continue;
    const auto status = completion_status(visit, instance);
    if (const auto* done = std::get_if<Complete>(&status)) {
      if (visit.entries.empty()) continue;  // nothing was worked
      auto& slot = out[visit.node];
      if (!slot || done->at < *slot) slot = done->at;
    }
  }
  return out;
}

}  // namespace

std::string to_string(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::kStructural: return "structural";
    case ConstraintFamily::kTemporal: return "temporal";
    case ConstraintFamily::kSpatial: return "spatial";
    case ConstraintFamily::kOrdering: return "ordering";
  }
  return "unknown";
}

std::size_t ViolationReport::count(ConstraintFamily family) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(),
      [family](const Violation& v) { return v.family == family; }));
}

void ViolationReport::append(ViolationReport other) {
  violations.insert(violations.end(), std::make_move_iterator(other.violations.begin()),
                    std::make_move_iterator(other.violations.end()));
}

ViolationReport check_structural(const Solution& solution, const Instance& instance) {
  ViolationReport report;
  // (node, location) -> times already seen, across visits.
  std::map<std::pair<NodeId, LocationId>, std::set<Time>> seen;
  for (const auto& visit : solution.visits) {
    if (!node_known(instance, visit.node)) {
      report.violations.push_back(make(ConstraintFamily::kStructural, {visit.node}, {}, 0,
                                       "visit references unknown node"));
      continue;
    }
    const NodeDemand& demand = instance.node(visit.node);
    if (!instance.has_location(visit.location) || !demand.allows_location(visit.location)) {
      report.violations.push_back(make(ConstraintFamily::kStructural, {visit.node}, {}, 0,
                                       "location " + std::to_string(visit.location) +
                                           " is not a possible location of the node"));
    }
    auto& times = seen[{visit.node, visit.location}];
    for (const auto& e : visit.entries) {
      if (e.coalition.empty()) {
        report.violations.push_back(make(ConstraintFamily::kStructural, {visit.node}, {},
                                         e.time, "empty coalition"));
      } else if (!coalition_usable(e.coalition, instance)) {
        report.violations.push_back(make(ConstraintFamily::kStructural, {visit.node}, {},
                                         e.time, "coalition member outside agent range"));
      } else if (instance.singleton_coalitions() && e.coalition.size() > 1) {
        report.violations.push_back(make(ConstraintFamily::kStructural, {visit.node},
                                         e.coalition.members(), e.time,
                                         "instance restricts coalitions to singletons"));
      }
      if (!demand.in_window(e.time)) {
        report.violations.push_back(make(ConstraintFamily::kStructural, {visit.node},
                                         e.coalition.members(), e.time,
                                         "work outside window [" +
                                             std::to_string(demand.earliest()) + ", " +
                                             std::to_string(demand.hard_latest()) + "]"));
      }
      if (!times.insert(e.time).second) {
        report.violations.push_back(make(ConstraintFamily::kStructural, {visit.node},
                                         e.coalition.members(), e.time,
                                         "more than one coalition at the same time"));
      }
    }
  }
  return report;
}

ViolationReport check_temporal(const Solution& solution, const Instance& instance) {
  ViolationReport report;
  std::map<NodeId, std::set<LocationId>> locations;
  for (const auto& visit : solution.visits) {
    if (!node_known(instance, visit.node)) continue;
    locations[visit.node].insert(visit.location);
  }
  for (const auto& [node, locs] : locations) {
    if (locs.size() > 1) {
      report.violations.push_back(make(ConstraintFamily::kTemporal, {node}, {}, 0,
                                       "node visited in " + std::to_string(locs.size()) +
                                           " locations"));
    }
  }

  for (const auto& visit : solution.visits) {
    if (!visit_usable(visit, instance)) continue;
    bool usable = true;
    for (const auto& e : visit.entries) usable = usable && coalition_usable(e.coalition, instance);
    if (!usable) continue;

    const NodeDemand& demand = instance.node(visit.node);
    const auto status = completion_status(visit, instance);
    if (const auto* open = std::get_if<Incomplete>(&status)) {
      std::ostringstream detail;
      detail << "workload not completed, remaining " << open->remaining;
      const Time last = visit.entries.empty() ? demand.earliest() : visit.entries.back().time;
      report.violations.push_back(
          make(ConstraintFamily::kTemporal, {visit.node}, {}, last, detail.str()));
      continue;
    }
    const Time done = std::get<Complete>(status).at;
    std::size_t late = 0;
    Time first_late = 0;
    for (const auto& e : visit.entries) {
      if (e.time > done) {
        if (late == 0 || e.time < first_late) first_late = e.time;
        ++late;
      }
    }
    if (late > 0) {
      report.violations.push_back(make(
          ConstraintFamily::kTemporal, {visit.node}, {}, first_late,
          std::to_string(late) + " work entries after completion at t=" + std::to_string(done)));
    }
  }
  return report;
}

ViolationReport check_spatial(const Solution& solution, const Instance& instance) {
  ViolationReport report;
  struct Engagement {
    Time time;
    NodeId node;
    LocationId location;
    std::size_t visit;
  };
  std::vector<std::vector<Engagement>> timeline(instance.agent_count());
  for (std::size_t i = 0; i < solution.visits.size(); ++i) {
    const auto& visit = solution.visits[i];
    if (!visit_usable(visit, instance)) continue;
    for (const auto& e : visit.entries) {
      for (AgentId a : e.coalition.members()) {
        if (a < instance.agent_count()) {
          timeline[a].push_back({e.time, visit.node, visit.location, i});
        }
      }
    }
  }

  for (AgentId a = 0; a < instance.agent_count(); ++a) {
    auto& events = timeline[a];
    std::sort(events.begin(), events.end(), [](const Engagement& x, const Engagement& y) {
      return std::tie(x.time, x.node, x.location, x.visit) <
             std::tie(y.time, y.node, y.location, y.visit);
    });
    const Agent& agent = instance.agent(a);

    // Reachability from the initial location, once per visit.
    std::set<std::size_t> reached_visits;
    for (const auto& ev : events) {
      if (!reached_visits.insert(ev.visit).second) continue;
      const Time lambda = instance.travel_time(a, agent.initial_location, ev.location);
      if (ev.time <= lambda) {
        report.violations.push_back(make(
            ConstraintFamily::kSpatial, {ev.node}, {a}, ev.time,
            "agent cannot reach location " + std::to_string(ev.location) +
                " from its start before t=" + std::to_string(lambda + 1)));
      }
    }

    for (std::size_t i = 1; i < events.size(); ++i) {
      const auto& prev = events[i - 1];
      const auto& cur = events[i];
      const bool same_place = prev.node == cur.node && prev.location == cur.location;
      if (cur.time == prev.time) {
        if (!same_place) {
          report.violations.push_back(
              make(ConstraintFamily::kSpatial, {prev.node, cur.node}, {a}, cur.time,
                   "agent engaged at two nodes at the same time"));
        }
        continue;
      }
      if (same_place) continue;
      const Time need = rules::earliest_slot(instance, a, prev.location, prev.time, cur.location);
      if (cur.time < need) {
        report.violations.push_back(make(
            ConstraintFamily::kSpatial, {prev.node, cur.node}, {a}, cur.time,
            "agent leaves node " + std::to_string(prev.node) + " at t=" +
                std::to_string(prev.time) + " and cannot work before t=" + std::to_string(need)));
      }
    }
  }
  return report;
}

ViolationReport check_ordering(const Solution& solution, const Instance& instance) {
  ViolationReport report;
  const auto completion = completion_times(solution, instance);
  for (const auto& [v1, v2] : instance.precedence().edges()) {
    const NodeDemand& first = instance.node(v1);
    const NodeDemand& second = instance.node(v2);
    if (second.earliest() > first.hard_latest()) continue;
    for (const auto& visit : solution.visits) {
      if (visit.node != v2) continue;
      for (const auto& e : visit.entries) {
        if (e.time > first.hard_latest()) continue;
        if (completion[v1] && *completion[v1] < e.time) continue;
        report.violations.push_back(make(
            ConstraintFamily::kOrdering, {v1, v2}, e.coalition.members(), e.time,
            "node " + std::to_string(v2) + " worked before predecessor " +
                std::to_string(v1) + " completed"));
        break;  // one report per (edge, visit)
      }
    }
  }
  return report;
}

ViolationReport validate(const Solution& solution, const Instance& instance) {
  ViolationReport report = check_structural(solution, instance);
  report.append(check_temporal(solution, instance));
  report.append(check_spatial(solution, instance));
  report.append(check_ordering(solution, instance));
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const Violation& a, const Violation& b) {
                     const NodeId na = a.nodes.empty() ? 0 : a.nodes.front();
                     const NodeId nb = b.nodes.empty() ? 0 : b.nodes.front();
                     return std::tie(na, a.time, a.family) < std::tie(nb, b.time, b.family);
                   });
  return report;
}

namespace rules {

Time earliest_slot(const Instance& instance, AgentId a, LocationId from, Time last,
                   LocationId to) {
  return last + instance.travel_time(a, from, to) + 1;
}

bool ordering_allows(const Instance& instance, NodeId v, Time t,
                     std::span<const std::optional<Time>> completion) {
  const NodeDemand& second = instance.node(v);
  for (NodeId pred : instance.precedence().predecessors(v)) {
    const NodeDemand& first = instance.node(pred);
    if (second.earliest() > first.hard_latest() || t > first.hard_latest()) continue;
    if (!(completion[pred] && *completion[pred] < t)) return false;
  }
  return true;
}

std::optional<Time> ordering_earliest(const Instance& instance, NodeId v, Time lower,
                                      std::span<const std::optional<Time>> completion) {
  const NodeDemand& second = instance.node(v);
  Time t = lower;
  for (NodeId pred : instance.precedence().predecessors(v)) {
    const NodeDemand& first = instance.node(pred);
    if (second.earliest() > first.hard_latest()) continue;
    const Time bound =
        completion[pred] ? std::min(*completion[pred], first.hard_latest()) + 1
                         : first.hard_latest() + 1;
    t = std::max(t, bound);
  }
  if (t > second.hard_latest()) return std::nullopt;
  return t;
}

}  // namespace rules

}  // namespace marsc
