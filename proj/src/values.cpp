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

#include "marsc/values.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace marsc {
namespace {

// Stream purposes, mixed into the key so that draws for different roles never
// share a sequence.
enum class Purpose : std::uint64_t {
  kSizeDraw = 1,
  kMemberDraw = 2,
  kAgentPerformance = 3,
  kAgentInCoalition = 4,
  kCongestionCoin = 5,
  kCongestionAmount = 6,
};

constexpr double kBonusProbability = 1.0 / 5.0;
constexpr double kBonusMax = 50.0;
constexpr double kNormalScale = 10.0;
constexpr double kNormalStddev = 0.01;
constexpr double kAgentPerformanceMax = 10.0;

std::uint64_t stream_key(std::uint64_t seed, ValueKind kind, Purpose purpose) {
  std::uint64_t h = mix64(seed);
  h = hash_combine64(h, static_cast<std::uint64_t>(kind) + 1);
  return hash_combine64(h, static_cast<std::uint64_t>(purpose));
}

std::uint64_t coalition_key(std::uint64_t base, const Coalition& c) {
  std::uint64_t h = base;
  for (AgentId a : c.members()) h = hash_combine64(h, std::uint64_t{a} + 1);
  return hash_combine64(h, c.size());
}

double clamp_nonnegative(double x) { return x < 0.0 ? 0.0 : x; }

}  // namespace

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::kSuperadditive: return "superadditive";
    case ValueKind::kUniform: return "uniform";
    case ValueKind::kNormal: return "normal";
    case ValueKind::kModifiedUniform: return "modified_uniform";
    case ValueKind::kModifiedNormal: return "modified_normal";
    case ValueKind::kAgentBased: return "agent_based";
    case ValueKind::kNdcs: return "ndcs";
    case ValueKind::kCongestedNdcs: return "congested_ndcs";
  }
  return "unknown";
}

ValueKind parse_value_kind(std::string_view name) {
  for (ValueKind kind : kAllValueKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown coalition value kind: " + std::string(name));
}

bool is_size_based(ValueKind kind) {
  switch (kind) {
    case ValueKind::kSuperadditive:
    case ValueKind::kUniform:
    case ValueKind::kNormal:
    case ValueKind::kModifiedUniform:
    case ValueKind::kModifiedNormal:
      return true;
    default:
      return false;
  }
}

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine64(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ (mix64(value) + 0x632be59bd9b4e019ULL + (seed << 6) + (seed >> 2)));
}

std::uint64_t KeyedStream::next_u64() {
  return mix64(key_ ^ mix64(++counter_));
}

double KeyedStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double KeyedStream::normal(double mean, double stddev) {
  const double u1 = 1.0 - next_unit();  // (0, 1]
  const double u2 = next_unit();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

CoalitionValueModel::CoalitionValueModel(ValueKind kind, std::uint64_t seed,
                                         std::size_t n_agents)
    : kind_(kind), seed_(seed), n_agents_(n_agents) {
  if (n_agents_ == 0 || n_agents_ > kMaxAgents) {
    throw std::invalid_argument("value model needs 1.." + std::to_string(kMaxAgents) +
                                " agents");
  }
}

double CoalitionValueModel::value(const Coalition& coalition, NodeId,
                                  LocationId) const {
  if (coalition.empty()) throw std::domain_error("coalition value of an empty coalition");
  if (coalition.bits()._Find_next(n_agents_ - 1) < kMaxAgents) {
    throw std::out_of_range("coalition member outside the agent id range");
  }
  if (is_size_based(kind_)) {
    const std::size_t size = coalition.size();
    {
      std::shared_lock lock(mutex_);
      if (auto it = by_size_.find(size); it != by_size_.end()) return it->second;
    }
    const double v = draw_by_size(size);
    std::unique_lock lock(mutex_);
    return by_size_.emplace(size, v).first->second;
  }
  {
    std::shared_lock lock(mutex_);
    if (auto it = by_members_.find(coalition); it != by_members_.end()) return it->second;
  }
  const double v = draw_by_members(coalition);
  std::unique_lock lock(mutex_);
  return by_members_.emplace(coalition, v).first->second;
}

void CoalitionValueModel::precompute_size_based() {
  if (!is_size_based(kind_)) {
    throw std::domain_error(std::string("kind ") + std::string(to_string(kind_)) +
                            " is membership-dependent and stays lazy");
  }
  std::unique_lock lock(mutex_);
  for (std::size_t size = 1; size <= n_agents_; ++size) {
    by_size_.emplace(size, draw_by_size(size));
  }
}

std::size_t CoalitionValueModel::memo_size() const {
  std::shared_lock lock(mutex_);
  return by_size_.size() + by_members_.size();
}

double CoalitionValueModel::agent_performance(AgentId a) const {
  KeyedStream s(hash_combine64(stream_key(seed_, kind_, Purpose::kAgentPerformance),
                               std::uint64_t{a} + 1));
  return s.uniform(0.0, kAgentPerformanceMax);
}

double CoalitionValueModel::draw_by_size(std::size_t size) const {
  const double n = static_cast<double>(size);
  KeyedStream s(hash_combine64(stream_key(seed_, kind_, Purpose::kSizeDraw), size));
  switch (kind_) {
    case ValueKind::kSuperadditive:
      return n;
    case ValueKind::kUniform:
      return s.uniform(0.0, n);
    case ValueKind::kNormal:
      return clamp_nonnegative(s.normal(kNormalScale * n, kNormalStddev));
    case ValueKind::kModifiedUniform: {
      double v = s.uniform(0.0, kNormalScale * n);
      if (s.bernoulli(kBonusProbability)) v += s.uniform(0.0, kBonusMax);
      return v;
    }
    case ValueKind::kModifiedNormal: {
      double v = clamp_nonnegative(s.normal(kNormalScale * n, kNormalStddev));
      if (s.bernoulli(kBonusProbability)) v += s.uniform(0.0, kBonusMax);
      return v;
    }
    default:
      throw std::logic_error("draw_by_size on a membership-dependent kind");
  }
}

double CoalitionValueModel::ndcs_base(const Coalition& coalition) const {
  // Keyed with the plain NDCS tag so congested NDCS perturbs exactly the value
  // an NDCS model with the same seed would return.
  const double n = static_cast<double>(coalition.size());
  KeyedStream s(coalition_key(stream_key(seed_, ValueKind::kNdcs, Purpose::kMemberDraw),
                              coalition));
  return clamp_nonnegative(s.normal(n, std::sqrt(n)));
}

double CoalitionValueModel::draw_by_members(const Coalition& coalition) const {
  switch (kind_) {
    case ValueKind::kAgentBased: {
      const std::uint64_t base =
          coalition_key(stream_key(seed_, kind_, Purpose::kAgentInCoalition), coalition);
      double total = 0.0;
      for (AgentId a : coalition.members()) {
        KeyedStream s(hash_combine64(base, std::uint64_t{a} + 1));
        total += s.uniform(0.0, 2.0 * agent_performance(a));
      }
      return total;
    }
    case ValueKind::kNdcs:
      return ndcs_base(coalition);
    case ValueKind::kCongestedNdcs: {
      const double omega = ndcs_base(coalition);
      KeyedStream coin(
          coalition_key(stream_key(seed_, kind_, Purpose::kCongestionCoin), coalition));
      const double p = static_cast<double>(coalition.size()) /
                       static_cast<double>(n_agents_ + 1);
      if (!coin.bernoulli(p)) return omega;
      KeyedStream amount(
          coalition_key(stream_key(seed_, kind_, Purpose::kCongestionAmount), coalition));
      return clamp_nonnegative(omega - amount.uniform(omega / 10.0, omega));
    }
    default:
      throw std::logic_error("draw_by_members on a size-based kind");
  }
}

}  // namespace marsc
