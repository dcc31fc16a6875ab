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

#include "marsc/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace marsc {
namespace {

constexpr std::uint64_t kRecordStream = 0x7265636f7264ULL;
constexpr std::uint64_t kStationStream = 0x73746174ULL;
constexpr std::uint64_t kBuildStream = 0x6275696c64ULL;
constexpr std::uint64_t kValueStream = 0x76616c756573ULL;

// Inclusive integer draw.
Time uniform_int(KeyedStream& s, Time lo, Time hi) {
  const double span = static_cast<double>(hi - lo + 1);
  const Time t = lo + static_cast<Time>(std::floor(s.next_unit() * span));
  return std::min(t, hi);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

bool parse_int(const std::string& text, Time& out) {
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool valid_lat(double x) { return x >= -90.0 && x <= 90.0; }
bool valid_lon(double x) { return x >= -180.0 && x <= 180.0; }

std::string iso_timestamp(std::int64_t epoch_seconds) {
  const std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RecordParseResult parse_records(std::istream& in) {
  static const std::vector<std::string> kRequired = {
      "id", "timestamp", "lat", "lon", "attendance_s", "station_lat", "station_lon"};
  RecordParseResult result;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("record file has no header");
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const auto& name : kRequired) {
    if (!column.contains(name)) {
      throw std::invalid_argument("record file is missing column '" + name + "'");
    }
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    auto cell = [&](const std::string& name) -> const std::string& {
      static const std::string kEmpty;
      const std::size_t i = column.at(name);
      return i < cells.size() ? cells[i] : kEmpty;
    };
    IncidentRecord r;
    r.id = cell("id");
    r.timestamp = cell("timestamp");
    std::string problem;
    if (!parse_double(cell("lat"), r.lat) || !valid_lat(r.lat)) {
      problem = "invalid latitude '" + cell("lat") + "'";
    } else if (!parse_double(cell("lon"), r.lon) || !valid_lon(r.lon)) {
      problem = "invalid longitude '" + cell("lon") + "'";
    } else if (!parse_int(cell("attendance_s"), r.attendance_seconds) ||
               r.attendance_seconds <= 0) {
      problem = "attendance_s must be a positive integer";
    } else if (!parse_double(cell("station_lat"), r.station_lat) || !valid_lat(r.station_lat)) {
      problem = "invalid station latitude";
    } else if (!parse_double(cell("station_lon"), r.station_lon) || !valid_lon(r.station_lon)) {
      problem = "invalid station longitude";
    }
    if (!problem.empty()) {
      result.warnings.push_back("line " + std::to_string(line_no) + ": " + problem);
      ++result.skipped;
      continue;
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

RecordParseResult parse_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open record file " + path);
  return parse_records(in);
}

void ScenarioParams::check() const {
  if (n_agents == 0 || n_agents > kMaxAgents) throw std::invalid_argument("n_agents out of range");
  if (ratio == 0) throw std::invalid_argument("ratio k must be >= 1");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
  if (!(precedence_prob >= 0.0 && precedence_prob <= 1.0)) {
    throw std::invalid_argument("precedence_prob must lie in [0, 1]");
  }
  if (profit < 0.0) throw std::invalid_argument("profit must be >= 0");
  if (station_pool == 0) throw std::invalid_argument("station pool must be nonempty");
  if (attendance_min <= 0 || attendance_min > attendance_max) {
    throw std::invalid_argument("attendance range must be positive and ordered");
  }
}

BuiltInstance build_instance(std::span<const IncidentRecord> records,
                             const ScenarioParams& params) {
  params.check();
  const std::size_t m = params.node_count();
  if (params.record_offset > records.size() || records.size() - params.record_offset < m) {
    const std::size_t available =
        records.size() > params.record_offset ? records.size() - params.record_offset : 0;
    throw std::invalid_argument("need " + std::to_string(m) + " records from offset " +
                                std::to_string(params.record_offset) + ", only " +
                                std::to_string(available) + " available (short by " +
                                std::to_string(m - available) + ")");
  }
  const auto used = records.subspan(params.record_offset, m);

  std::vector<Location> locations;
  std::map<std::pair<double, double>, LocationId> station_ids;
  for (const auto& r : used) {
    const auto key = std::make_pair(r.station_lat, r.station_lon);
    if (station_ids.contains(key)) continue;
    const auto id = static_cast<LocationId>(locations.size());
    station_ids.emplace(key, id);
    locations.push_back(Location{id, r.station_lat, r.station_lon});
  }
  const std::size_t n_stations = locations.size();

  std::vector<Agent> agents;
  for (AgentId a = 0; a < params.n_agents; ++a) {
    agents.push_back(Agent{a, static_cast<LocationId>(a % n_stations), params.speed});
  }

  const TravelModel travel(DistanceMode::kGeo);
  KeyedStream draws(hash_combine64(hash_combine64(params.seed, kBuildStream),
                                   params.record_offset));
  std::vector<NodeDemand> nodes;
  nodes.reserve(m);
  for (const auto& r : used) {
    const auto id = static_cast<LocationId>(locations.size());
    locations.push_back(Location{id, r.lat, r.lon});
    Time earliest = std::numeric_limits<Time>::max();
    for (const auto& agent : agents) {
      earliest = std::min(earliest,
                          travel.travel_time(agent, locations[agent.initial_location], locations.back()));
    }
    const Time kappa = r.attendance_seconds;
    const Time hard = earliest + kappa;
    const Time soft = uniform_int(draws, earliest, hard);
    const Time half = (kappa + 1) / 2;  // ceil(kappa / 2)
    const double workload = static_cast<double>(uniform_int(draws, half, kappa));
    nodes.emplace_back(std::vector<LocationId>{id}, workload, params.profit, earliest, soft, hard);
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < m; ++i) {
    const auto& a = nodes[i];
    const auto& b = nodes[i + 1];
    const bool eligible = a.earliest() <= b.earliest() && a.hard_latest() < b.hard_latest();
    // The coin is drawn for every pair so later draws do not shift with eligibility.
    const bool heads = draws.bernoulli(params.precedence_prob);
    if (eligible && heads) edges.emplace_back(i, i + 1);
  }

  auto values = std::make_shared<CoalitionValueModel>(
      params.value_kind, hash_combine64(params.seed, kValueStream), params.n_agents);
  if (is_size_based(params.value_kind)) values->precompute_size_based();

  Instance instance(std::move(locations), std::move(agents), std::move(nodes),
                    PrecedenceDag(m, std::move(edges)), travel, std::move(values));
  return BuiltInstance{std::move(instance), params.record_offset + m};
}

std::vector<std::pair<double, double>> station_pool(const ScenarioParams& params) {
  std::vector<std::pair<double, double>> out;
  out.reserve(params.station_pool);
  for (std::size_t i = 0; i < params.station_pool; ++i) {
    KeyedStream s(hash_combine64(hash_combine64(params.seed, kStationStream), i));
    const double lat = s.uniform(params.box.lat_min, params.box.lat_max);
    const double lon = s.uniform(params.box.lon_min, params.box.lon_max);
    out.emplace_back(lat, lon);
  }
  return out;
}

std::vector<IncidentRecord> synth_records(const ScenarioParams& params, std::size_t count) {
  params.check();
  const auto stations = station_pool(params);
  const TravelModel travel(DistanceMode::kGeo);
  constexpr std::int64_t kFirstRecordEpoch = 1230768000;  // 2009-01-01T00:00:00Z
  std::vector<IncidentRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    KeyedStream s(hash_combine64(hash_combine64(params.seed, kRecordStream), i));
    IncidentRecord r;
    r.id = "S" + std::to_string(i + 1);
    r.timestamp = iso_timestamp(kFirstRecordEpoch + static_cast<std::int64_t>(i) * 900);
    r.lat = s.uniform(params.box.lat_min, params.box.lat_max);
    r.lon = s.uniform(params.box.lon_min, params.box.lon_max);
    r.attendance_seconds = uniform_int(s, params.attendance_min, params.attendance_max);
    const Location incident{0, r.lat, r.lon};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [lat, lon] : stations) {
      const double d = travel.distance(Location{1, lat, lon}, incident);
      if (d < best) {
        best = d;
        r.station_lat = lat;
        r.station_lon = lon;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

Instance synth_instance(const ScenarioParams& params) {
  const auto records = synth_records(params, params.record_offset + params.node_count());
  return build_instance(records, params).instance;
}

}  // namespace marsc
