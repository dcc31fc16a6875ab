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

#include <string>

#include "json.hpp"
#include "marsc/exact.hpp"
#include "marsc/feasibility.hpp"
#include "marsc/model.hpp"
#include "marsc/scenarios.hpp"

namespace marsc {

using Json = nlohmann::json;

// Instance document: top-level keys locations, agents, nodes, precedence,
// travel, t_max, plus values ({"kind", "seed"}) and singleton_coalitions.
// Parsing checks t_max against the nodes. See schema/instance.schema.json.
Json instance_to_json(const Instance& instance);
Instance instance_from_json(const Json& doc);

Json solution_to_json(const Solution& solution, double score);
Solution solution_from_json(const Json& doc);

Json violation_to_json(const Violation& violation);
// One JSON object per line.
std::string to_json_lines(const ViolationReport& report);

Json toptw_to_json(const ToptwInstance& toptw);
ToptwInstance toptw_from_json(const Json& doc);

// Missing keys keep their defaults.
ScenarioParams scenario_params_from_json(const Json& doc);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace marsc
