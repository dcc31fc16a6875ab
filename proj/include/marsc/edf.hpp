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

#include <vector>

#include "marsc/bnt.hpp"
#include "marsc/model.hpp"

namespace marsc {

enum class EdfKey {
  kEarliestFirst,  // (earliest, hard latest, id)
  kDeadlineFirst,  // (hard latest, earliest, id)
};

std::string to_string(EdfKey key);
// "earliest" or "deadline".
EdfKey parse_edf_key(const std::string& text);

struct EdfOptions {
  EdfKey key = EdfKey::kEarliestFirst;
  bool proximity_filter = true;
  Accrual accrual = Accrual::kLiteral;
};

// Visiting order used by solve_edf, repaired for precedences.
std::vector<NodeId> edf_order(const Instance& instance, EdfKey key);

// Single pass over edf_order: each node gets the same candidate selection and
// minimal coalition as a BNT step, and is skipped when no coalition can serve
// it. Metadata traversals counts node considerations (always |V|).
Solution solve_edf(const Instance& instance, const EdfOptions& options = {});

}  // namespace marsc
