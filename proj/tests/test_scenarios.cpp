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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "marsc/scenarios.hpp"
#include "support.hpp"

namespace marsc {
namespace {

constexpr const char* kHeader = "id,timestamp,lat,lon,attendance_s,station_lat,station_lon\n";

IncidentRecord record(const std::string& id, double lat, double lon, Time kappa,
                      double slat = 51.5, double slon = -0.12) {
  return IncidentRecord{id, "2020-01-01T00:00:00Z", lat, lon, kappa, slat, slon};
}

TEST(ParseRecords, HeaderOnly) {
  std::istringstream in(kHeader);
  const auto r = parse_records(in);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.skipped, 0u);
}

TEST(ParseRecords, PreservesOrder) {
  std::istringstream in(std::string(kHeader) +
                        "c,2020-01-01T00:00:00Z,51.5,-0.1,300,51.4,-0.2\n"
                        "a,2020-01-01T00:01:00Z,51.6,-0.2,200,51.4,-0.2\n"
                        "b,2020-01-01T00:02:00Z,51.4,0.1,150,51.5,0.0\n");
  const auto r = parse_records(in);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[0].id, "c");
  EXPECT_EQ(r.records[1].id, "a");
  EXPECT_EQ(r.records[2].id, "b");
  EXPECT_EQ(r.records[0].attendance_seconds, 300);
  EXPECT_DOUBLE_EQ(r.records[2].lon, 0.1);
}

TEST(ParseRecords, OutOfRangeLatitudeSkippedWithWarning) {
  std::istringstream in(std::string(kHeader) +
                        "a,2020-01-01T00:00:00Z,400,-0.1,300,51.4,-0.2\n"
                        "b,2020-01-01T00:01:00Z,51.6,-0.2,200,51.4,-0.2\n");
  const auto r = parse_records(in);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.skipped, 1u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("line 2"), std::string::npos);
}

TEST(ParseRecords, NonPositiveAttendanceAndJunkSkipped) {
  std::istringstream in(std::string(kHeader) +
                        "a,t,51.5,-0.1,0,51.4,-0.2\n"
                        "b,t,51.5,-0.1,abc,51.4,-0.2\n"
                        "c,t,51.5\n");
  const auto r = parse_records(in);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.skipped, 3u);
}

TEST(ParseRecords, MissingColumnIsAnError) {
  std::istringstream in("id,timestamp,lat,lon,station_lat,station_lon\n");
  EXPECT_THROW(parse_records(in), std::invalid_argument);
}

TEST(BuildInstance, NoEdgeWhenEarliestTimesDecrease) {
  // Node 0 is far from the station, node 1 is at the station, so
  // alpha_0 > alpha_1 and no coin can add 0 -> 1.
  std::vector<IncidentRecord> recs{record("far", 51.6, -0.12, 600),
                                   record("near", 51.5, -0.12, 900)};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ScenarioParams p;
    p.n_agents = 1;
    p.ratio = 2;
    p.precedence_prob = 1.0;
    p.seed = seed;
    const auto built = build_instance(recs, p);
    ASSERT_GT(built.instance.node(0).earliest(), built.instance.node(1).earliest());
    EXPECT_TRUE(built.instance.precedence().edges().empty());
  }
}

TEST(BuildInstance, CertainCoinLinksEligiblePairs) {
  std::vector<IncidentRecord> recs{record("a", 51.5, -0.12, 300), record("b", 51.5, -0.12, 600)};
  ScenarioParams p;
  p.n_agents = 1;
  p.ratio = 2;
  p.precedence_prob = 1.0;
  const auto built = build_instance(recs, p);
  ASSERT_EQ(built.instance.precedence().edges().size(), 1u);
  p.precedence_prob = 0.0;
  EXPECT_TRUE(build_instance(recs, p).instance.precedence().edges().empty());
}

TEST(BuildInstance, RangeAuditOverThousandNodes) {
  ScenarioParams p;
  p.n_agents = 50;
  p.ratio = 20;
  p.seed = 31;
  auto recs = synth_records(p, 1000);
  for (auto& r : recs) r.attendance_seconds = 300;
  const Instance inst = build_instance(recs, p).instance;
  ASSERT_EQ(inst.node_count(), 1000u);
  for (const auto& d : inst.nodes()) {
    EXPECT_GE(d.workload(), 150.0);
    EXPECT_LE(d.workload(), 300.0);
    EXPECT_EQ(d.workload(), std::floor(d.workload()));
    EXPECT_GE(d.soft_latest(), d.earliest());
    EXPECT_LE(d.soft_latest(), d.hard_latest());
    EXPECT_EQ(d.hard_latest() - d.earliest(), 300);
    EXPECT_EQ(d.profit(), 1.0);
  }
}

TEST(BuildInstance, EarliestIsNearestAgentTravelTime) {
  ScenarioParams p;
  p.n_agents = 6;
  p.ratio = 3;
  p.seed = 4;
  const auto recs = synth_records(p, 18);
  const Instance inst = build_instance(recs, p).instance;
  for (NodeId v = 0; v < inst.node_count(); ++v) {
    const LocationId l = inst.node(v).locations().front();
    Time best = std::numeric_limits<Time>::max();
    for (AgentId a = 0; a < inst.agent_count(); ++a) {
      const Location& from = inst.location(inst.agent(a).initial_location);
      const Location& to = inst.location(l);
      const double meters = testing::haversine_meters(from.first, from.second, to.first, to.second);
      best = std::min(best, static_cast<Time>(std::ceil(meters / p.speed)));
    }
    EXPECT_EQ(inst.node(v).earliest(), best);
    EXPECT_DOUBLE_EQ(inst.location(l).first, recs[v].lat);
  }
}

TEST(BuildInstance, AgentsStartAtRecordStationsRoundRobin) {
  std::vector<IncidentRecord> recs{record("a", 51.5, -0.1, 300, 51.40, -0.2),
                                   record("b", 51.5, -0.1, 300, 51.45, -0.3),
                                   record("c", 51.5, -0.1, 300, 51.40, -0.2)};
  ScenarioParams p;
  p.n_agents = 3;
  p.ratio = 1;
  const Instance inst = build_instance(recs, p).instance;
  EXPECT_DOUBLE_EQ(inst.location(inst.agent(0).initial_location).first, 51.40);
  EXPECT_DOUBLE_EQ(inst.location(inst.agent(1).initial_location).first, 51.45);
  EXPECT_DOUBLE_EQ(inst.location(inst.agent(2).initial_location).first, 51.40);
}

TEST(BuildInstance, ChronologicalCursor) {
  ScenarioParams p;
  p.n_agents = 2;
  p.ratio = 3;
  p.seed = 5;
  const auto recs = synth_records(p, 12);
  const auto first = build_instance(recs, p);
  EXPECT_EQ(first.next_offset, 6u);
  p.record_offset = first.next_offset;
  const auto second = build_instance(recs, p);
  EXPECT_EQ(second.next_offset, 12u);
  for (NodeId v = 0; v < 6; ++v) {
    const auto& l = second.instance.location(second.instance.node(v).locations().front());
    EXPECT_DOUBLE_EQ(l.first, recs[6 + v].lat);
    EXPECT_DOUBLE_EQ(l.second, recs[6 + v].lon);
  }
  p.record_offset = 8;
  EXPECT_THROW(build_instance(recs, p), std::invalid_argument);
}

TEST(SynthInstance, Deterministic) {
  ScenarioParams p;
  p.n_agents = 2;
  p.ratio = 1;
  p.seed = 7;
  const Instance a = synth_instance(p);
  const Instance b = synth_instance(p);
  ASSERT_EQ(a.node_count(), b.node_count());
  for (NodeId v = 0; v < a.node_count(); ++v) {
    EXPECT_EQ(a.node(v).earliest(), b.node(v).earliest());
    EXPECT_EQ(a.node(v).soft_latest(), b.node(v).soft_latest());
    EXPECT_EQ(a.node(v).hard_latest(), b.node(v).hard_latest());
    EXPECT_EQ(a.node(v).workload(), b.node(v).workload());
  }
  for (std::size_t i = 0; i < a.locations().size(); ++i) {
    EXPECT_EQ(a.locations()[i].first, b.locations()[i].first);
    EXPECT_EQ(a.locations()[i].second, b.locations()[i].second);
  }
  p.seed = 8;
  EXPECT_NE(synth_instance(p).locations().back().first, a.locations().back().first);
}

TEST(SynthInstance, FullScaleNodeCount) {
  ScenarioParams p;
  p.n_agents = 150;
  p.ratio = 20;
  EXPECT_EQ(synth_instance(p).node_count(), 3000u);
}

TEST(SynthInstance, WindowsOrderedAndEdgesWellFormed) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ScenarioParams p;
    p.n_agents = 4;
    p.ratio = 5;
    p.seed = seed;
    const Instance inst = synth_instance(p);
    for (const auto& d : inst.nodes()) {
      EXPECT_LE(d.earliest(), d.soft_latest());
      EXPECT_LE(d.soft_latest(), d.hard_latest());
      const Time kappa = d.hard_latest() - d.earliest();
      EXPECT_GE(kappa, p.attendance_min);
      EXPECT_LE(kappa, p.attendance_max);
    }
    for (const auto& [from, to] : inst.precedence().edges()) {
      EXPECT_EQ(to, from + 1);
      EXPECT_LT(inst.node(from).hard_latest(), inst.node(to).hard_latest());
      EXPECT_LE(inst.node(from).earliest(), inst.node(to).earliest());
    }
    for (const auto& l : inst.locations()) {
      EXPECT_GE(l.first, p.box.lat_min);
      EXPECT_LE(l.first, p.box.lat_max);
      EXPECT_GE(l.second, p.box.lon_min);
      EXPECT_LE(l.second, p.box.lon_max);
    }
  }
}

TEST(ScenarioParams, Validation) {
  ScenarioParams p;
  p.ratio = 0;
  EXPECT_THROW(p.check(), std::invalid_argument);
  p.ratio = 1;
  p.precedence_prob = 1.5;
  EXPECT_THROW(p.check(), std::invalid_argument);
}

TEST(StationPool, SizeAndBox) {
  ScenarioParams p;
  const auto pool = station_pool(p);
  EXPECT_EQ(pool.size(), 103u);
  for (const auto& [lat, lon] : pool) {
    EXPECT_GE(lat, p.box.lat_min);
    EXPECT_LE(lat, p.box.lat_max);
    EXPECT_GE(lon, p.box.lon_min);
    EXPECT_LE(lon, p.box.lon_max);
  }
}

}  // namespace
}  // namespace marsc
