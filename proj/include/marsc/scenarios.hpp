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

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "marsc/model.hpp"
#include "marsc/values.hpp"

namespace marsc {

// One incident with the attendance time of the first responders. CSV header:
//   id,timestamp,lat,lon,attendance_s,station_lat,station_lon
struct IncidentRecord {
  std::string id;
  std::string timestamp;
  double lat = 0.0;
  double lon = 0.0;
  Time attendance_seconds = 0;
  double station_lat = 0.0;
  double station_lon = 0.0;
};

struct RecordParseResult {
  std::vector<IncidentRecord> records;
  std::vector<std::string> warnings;  // one per skipped row, with line number
  std::size_t skipped = 0;
};

// Columns are matched by header name, in any order. Throws
// std::invalid_argument when a required column is missing.
RecordParseResult parse_records(std::istream& in);
RecordParseResult parse_records_file(const std::string& path);

struct BoundingBox {
  // Greater London.
  double lat_min = 51.28;
  double lat_max = 51.69;
  double lon_min = -0.51;
  double lon_max = 0.33;
};

struct ScenarioParams {
  std::size_t n_agents = 10;
  std::size_t ratio = 1;  // |V| = n_agents * ratio
  ValueKind value_kind = ValueKind::kSuperadditive;
  std::uint64_t seed = 0;
  double speed = 10.0;  // meters per second, one time unit per second
  double precedence_prob = 0.5;
  double profit = 1.0;
  std::size_t record_offset = 0;
  BoundingBox box;
  std::size_t station_pool = 103;
  Time attendance_min = 120;
  Time attendance_max = 1200;

  std::size_t node_count() const { return n_agents * ratio; }
  void check() const;
};

struct BuiltInstance {
  Instance instance;
  std::size_t next_offset = 0;  // chronological record cursor after this build
};

// Consumes records [record_offset, record_offset + |V|): one single-location
// node per record, agents round-robin over the distinct responding stations,
// windows from the nearest agent's travel time and the attendance time, and
// chain precedences drawn between consecutive records.
BuiltInstance build_instance(std::span<const IncidentRecord> records,
                             const ScenarioParams& params);

// Stations sampled uniformly in the bounding box.
std::vector<std::pair<double, double>> station_pool(const ScenarioParams& params);

// `count` chronological synthetic records: uniform incident locations,
// attendance uniform in [attendance_min, attendance_max], responding station
// the nearest pool station.
std::vector<IncidentRecord> synth_records(const ScenarioParams& params, std::size_t count);

// synth_records followed by build_instance; fully determined by params.
Instance synth_instance(const ScenarioParams& params);

}  // namespace marsc
