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
#include <thread>

#include "marsc/values.hpp"

namespace marsc {
namespace {

Coalition first_k(std::size_t k) {
  Coalition c;
  for (AgentId a = 0; a < k; ++a) c.insert(a);
  return c;
}

TEST(Values, SuperadditiveIsCoalitionSize) {
  CoalitionValueModel m(ValueKind::kSuperadditive, 1, 5);
  EXPECT_EQ(m.value(Coalition{0, 1, 2}), 3.0);
  EXPECT_EQ(m.value(Coalition{4}), 1.0);
}

TEST(Values, EmptyCoalitionIsADomainError) {
  for (ValueKind kind : kAllValueKinds) {
    CoalitionValueModel m(kind, 1, 4);
    EXPECT_THROW(m.value(Coalition{}), std::domain_error) << to_string(kind);
  }
}

TEST(Values, RepeatedQueriesAreBitIdentical) {
  for (ValueKind kind : kAllValueKinds) {
    CoalitionValueModel m(kind, 77, 6);
    CoalitionValueModel fresh(kind, 77, 6);
    const Coalition c{0, 2, 5};
    const double first = m.value(c);
    EXPECT_EQ(m.value(c), first);
    EXPECT_EQ(m.value(c, 3, 9), first);  // (v, l) are ignored
    // Query order does not matter.
    fresh.value(Coalition{1});
    fresh.value(Coalition{1, 2, 3, 4});
    EXPECT_EQ(fresh.value(c), first) << to_string(kind);
  }
}

TEST(Values, NonNegativeAndInRange) {
  for (ValueKind kind : kAllValueKinds) {
    CoalitionValueModel m(kind, 5, 8);
    for (std::uint32_t mask = 1; mask < 256; ++mask) {
      Coalition c;
      for (AgentId a = 0; a < 8; ++a) {
        if (mask & (1u << a)) c.insert(a);
      }
      const double v = m.value(c);
      const double k = static_cast<double>(c.size());
      EXPECT_GE(v, 0.0);
      switch (kind) {
        case ValueKind::kUniform:
          EXPECT_LE(v, k);
          break;
        case ValueKind::kModifiedUniform:
          EXPECT_LE(v, 10 * k + 50);
          break;
        case ValueKind::kAgentBased:
          EXPECT_LE(v, 20 * k);
          break;
        case ValueKind::kNormal:
          EXPECT_NEAR(v, 10 * k, 1.0);  // stddev 0.01
          break;
        default:
          break;
      }
    }
  }
}

TEST(Values, CongestedNdcsNeverExceedsNdcsBase) {
  CoalitionValueModel ndcs(ValueKind::kNdcs, 13, 8);
  CoalitionValueModel congested(ValueKind::kCongestedNdcs, 13, 8);
  int reduced = 0;
  for (std::uint32_t mask = 1; mask < 256; ++mask) {
    Coalition c;
    for (AgentId a = 0; a < 8; ++a) {
      if (mask & (1u << a)) c.insert(a);
    }
    EXPECT_LE(congested.value(c), ndcs.value(c) + 1e-12);
    if (congested.value(c) < ndcs.value(c)) ++reduced;
  }
  EXPECT_GT(reduced, 0);
}

TEST(Values, SizeBasedKindsDependOnlyOnSize) {
  for (ValueKind kind : kAllValueKinds) {
    if (!is_size_based(kind)) continue;
    CoalitionValueModel m(kind, 8, 6);
    EXPECT_EQ(m.value(Coalition{0, 1}), m.value(Coalition{3, 5})) << to_string(kind);
  }
  CoalitionValueModel ndcs(ValueKind::kNdcs, 8, 6);
  EXPECT_NE(ndcs.value(Coalition{0, 1}), ndcs.value(Coalition{3, 5}));
}

TEST(Values, NdcsMeanWithinThreeStandardErrors) {
  // N(4, sqrt(4)) clamped at zero; the clamp shifts the mean by far less
  // than one standard error at this size.
  constexpr int kSamples = 10000;
  double sum = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    CoalitionValueModel m(ValueKind::kNdcs, 1000 + i, 4);
    sum += m.value(first_k(4));
  }
  const double se = 2.0 / std::sqrt(double(kSamples));
  EXPECT_NEAR(sum / kSamples, 4.0, 3 * se);
}

TEST(Values, SuperadditiveStrictlyMonotoneOverSubsets) {
  constexpr std::size_t n = 10;
  CoalitionValueModel m(ValueKind::kSuperadditive, 0, n);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Coalition c;
    for (AgentId a = 0; a < n; ++a) {
      if (mask & (1u << a)) c.insert(a);
    }
    for (AgentId a = 0; a < n; ++a) {
      if (mask & (1u << a)) continue;
      Coalition bigger = c;
      bigger.insert(a);
      EXPECT_LT(m.value(c), m.value(bigger));
    }
  }
}

TEST(Values, PrecomputeSuperadditiveTable) {
  CoalitionValueModel m(ValueKind::kSuperadditive, 0, 5);
  m.precompute_size_based();
  EXPECT_EQ(m.memo_size(), 5u);
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(m.value(first_k(k)), double(k));
  EXPECT_EQ(m.memo_size(), 5u);
}

TEST(Values, PrecomputeUniformRanges) {
  CoalitionValueModel m(ValueKind::kUniform, 42, 3);
  m.precompute_size_based();
  EXPECT_EQ(m.memo_size(), 3u);
  for (std::size_t k = 1; k <= 3; ++k) {
    const double v = m.value(first_k(k));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, double(k));
  }
  EXPECT_EQ(m.memo_size(), 3u);
}

TEST(Values, PrecomputeRejectsMembershipKinds) {
  for (auto kind : {ValueKind::kAgentBased, ValueKind::kNdcs, ValueKind::kCongestedNdcs}) {
    CoalitionValueModel m(kind, 1, 3);
    EXPECT_THROW(m.precompute_size_based(), std::domain_error);
  }
}

TEST(Values, ConcurrentQueriesAgree) {
  CoalitionValueModel shared(ValueKind::kCongestedNdcs, 2024, 12);
  CoalitionValueModel serial(ValueKind::kCongestedNdcs, 2024, 12);
  std::vector<std::thread> workers;
  std::vector<std::vector<double>> seen(4);
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      for (std::uint32_t mask = 1; mask < 4096; ++mask) {
        const std::uint32_t m = (w % 2) ? 4096 - mask : mask;
        Coalition c;
        for (AgentId a = 0; a < 12; ++a) {
          if (m & (1u << a)) c.insert(a);
        }
        seen[w].push_back(shared.value(c));
      }
    });
  }
  for (auto& t : workers) t.join();
  for (std::uint32_t mask = 1; mask < 4096; ++mask) {
    Coalition c;
    for (AgentId a = 0; a < 12; ++a) {
      if (mask & (1u << a)) c.insert(a);
    }
    EXPECT_EQ(seen[0][mask - 1], serial.value(c));
    EXPECT_EQ(seen[1][4096 - mask - 1], serial.value(c));
  }
}

TEST(Values, AgentBasedUsesPerAgentPerformance) {
  CoalitionValueModel m(ValueKind::kAgentBased, 9, 4);
  for (AgentId a = 0; a < 4; ++a) {
    const double p = m.agent_performance(a);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 10.0);
    EXPECT_LE(m.value(Coalition{a}), 2 * p + 1e-12);
  }
}

TEST(Values, KindNamesRoundTrip) {
  for (ValueKind kind : kAllValueKinds) {
    EXPECT_EQ(parse_value_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_value_kind("lognormal"), std::invalid_argument);
}

TEST(Values, KeyedStreamIsCounterBased) {
  KeyedStream a(123), b(123), c(124);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  KeyedStream u(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next_unit();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

}  // namespace
}  // namespace marsc
