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

#include "marsc/edf.hpp"

#include <stdexcept>

#include <chrono>
#include <tuple>

namespace marsc {

std::string to_string(EdfKey key) {
  return key == EdfKey::kEarliestFirst ? "earliest" : "deadline";
}

EdfKey parse_edf_key(const std::string& text) {
  if (text == "earliest") return EdfKey::kEarliestFirst;
  if (text == "deadline") return EdfKey::kDeadlineFirst;
  throw std::invalid_argument("unknown EDF key '" + text + "'");
}

std::vector<NodeId> edf_order(const Instance& instance, EdfKey key) {
  return sort_nodes_by(instance, [&instance, key](NodeId a, NodeId b) {
    const NodeDemand& x = instance.node(a);
    const NodeDemand& y = instance.node(b);
    if (key == EdfKey::kEarliestFirst) {
      return std::tuple(x.earliest(), x.hard_latest()) <
             std::tuple(y.earliest(), y.hard_latest());
    }
    return std::tuple(x.hard_latest(), x.earliest()) <
           std::tuple(y.hard_latest(), y.earliest());
  });
}

Solution solve_edf(const Instance& instance, const EdfOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  SearchState state(instance);
  BntOptions step_options;
  step_options.proximity_filter = options.proximity_filter;
  step_options.accrual = options.accrual;

  for (NodeId v : edf_order(instance, options.key)) {
    ++state.traversal_count;
    if (auto singleton = best_singleton(state, v, step_options)) {
      state.commit(*singleton);
    } else {
      state.set_pending(v, false);
    }
  }

  Solution out = state.take_partial();
  out.metadata.solver = "edf";
  out.metadata.traversals = state.traversal_count;
  out.metadata.wall_millis = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
  return out;
}

}  // namespace marsc
