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

#include <array>
#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "marsc/model.hpp"

namespace marsc {

enum class ValueKind : std::uint8_t {
  kSuperadditive,
  kUniform,
  kNormal,
  kModifiedUniform,
  kModifiedNormal,
  kAgentBased,
  kNdcs,
  kCongestedNdcs,
};

inline constexpr std::array<ValueKind, 8> kAllValueKinds = {
    ValueKind::kSuperadditive,   ValueKind::kUniform,
    ValueKind::kNormal,          ValueKind::kModifiedUniform,
    ValueKind::kModifiedNormal,  ValueKind::kAgentBased,
    ValueKind::kNdcs,            ValueKind::kCongestedNdcs,
};

std::string_view to_string(ValueKind kind);
// Accepts the snake_case names, e.g. "modified_normal". Throws on unknown.
ValueKind parse_value_kind(std::string_view name);
// Values depend only on |C| for these kinds; they can be tabulated up front.
bool is_size_based(ValueKind kind);

// Counter-based random stream. Every draw is a pure function of the key the
// stream was opened with and the draw index.
class KeyedStream {
 public:
  explicit KeyedStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double next_unit();
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
  // Box-Muller; stddev is the standard deviation.
  double normal(double mean, double stddev);
  bool bernoulli(double p) { return next_unit() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine64(std::uint64_t seed, std::uint64_t value);

// Seeded, memoized coalition value function u(C, v, l). Values ignore the node
// and location; every draw is derived from (seed, kind, key) so the result
// never depends on query order.
class CoalitionValueModel {
 public:
  CoalitionValueModel(ValueKind kind, std::uint64_t seed, std::size_t n_agents);

  ValueKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t n_agents() const { return n_agents_; }

  // Throws std::domain_error for an empty coalition.
  double value(const Coalition& coalition, NodeId node = 0,
               LocationId location = 0) const;

  // Fills the size table for 1..n. Throws std::domain_error for kinds whose
  // values depend on membership.
  void precompute_size_based();

  std::size_t memo_size() const;
  // Per-agent individual performance p_a (agent_based kind only).
  double agent_performance(AgentId a) const;

 private:
  double draw_by_size(std::size_t size) const;
  double draw_by_members(const Coalition& coalition) const;
  double ndcs_base(const Coalition& coalition) const;

  ValueKind kind_;
  std::uint64_t seed_;
  std::size_t n_agents_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::size_t, double> by_size_;
  mutable std::unordered_map<Coalition, double, CoalitionHash> by_members_;
};

}  // namespace marsc
