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
#include <optional>
#include <string>
#include <vector>

#include "marsc/edf.hpp"
#include "marsc/io.hpp"
#include "marsc/model.hpp"
#include "marsc/scenarios.hpp"
#include "marsc/values.hpp"

namespace marsc {

enum class Algorithm { kBnt, kEdf, kExact };

std::string to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& text);

struct ExperimentConfig {
  std::vector<Algorithm> algorithms{Algorithm::kBnt, Algorithm::kEdf};
  std::vector<std::size_t> ratios{1};
  std::size_t n_agents = 10;
  std::vector<ValueKind> kinds{ValueKind::kSuperadditive};
  std::size_t replicates = 100;
  std::uint64_t master_seed = 0;
  Accrual accrual = Accrual::kLiteral;
  std::string output;
  // BNT restarts per instance; 1 means a single greedy pass.
  std::size_t bnt_runs = 1;
  std::size_t exact_dim_cap = 25;
  EdfKey edf_key = EdfKey::kEarliestFirst;
  // Scenario knobs other than n_agents, ratio, kind and seed.
  ScenarioParams scenario;

  // Throws std::invalid_argument when replicates is 0, ratios or algorithms
  // are empty, or a ratio is 0.
  void check() const;
};

ExperimentConfig experiment_config_from_json(const Json& doc);

struct ResultRow {
  Algorithm algo = Algorithm::kBnt;
  ValueKind kind = ValueKind::kSuperadditive;
  std::size_t ratio = 1;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double score = 0.0;
  double cpu_millis = 0.0;
  std::uint64_t traversals = 0;
  bool skipped = false;
};

// Scenario seed of one grid cell:
//   mix64(hash_combine64(hash_combine64(hash_combine64(master, kind_index),
//                                       ratio), replicate))
// with kind_index the position of the kind in kAllValueKinds. Independent of
// the order in which the grid is walked.
std::uint64_t child_seed(std::uint64_t master, ValueKind kind, std::size_t ratio,
                         std::size_t replicate);

// Rows sorted by (kind, ratio, replicate, algo). `jobs` worker threads share
// the cells; 0 means hardware concurrency.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

inline constexpr const char* kResultsHeader =
    "algo,kind,ratio,replicate,seed,score,cpu_millis,traversals,skipped";

std::string results_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> results_from_csv(std::istream& in);

struct SummaryStats {
  double median = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline constexpr std::uint64_t kBootstrapSeed = 20260101;
inline constexpr std::size_t kBootstrapResamples = 1000;

// Median (mean of the middle two for even sizes) and a percentile bootstrap
// 95% interval of the median. Throws std::domain_error on an empty list.
SummaryStats summarize(const std::vector<double>& samples, std::uint64_t seed = kBootstrapSeed);

// score_bnt / score_edf, with 0/0 = 1 and x/0 = +inf for x > 0. Throws
// std::domain_error on negative input.
double eta(double score_bnt, double score_edf);

struct SummaryRow {
  std::string metric;  // score, cpu_millis or eta
  std::string algo;    // solver name, or "bnt/edf" for eta rows
  std::string kind;    // value kind, or "all"
  std::string ratio;   // k, or "all"
  std::size_t count = 0;
  std::size_t infinite = 0;  // eta only: samples excluded as +inf
  SummaryStats stats;
};

// Per (algo, kind, ratio) score and CPU rows; eta rows per (kind, ratio),
// pooled per kind, and pooled overall. Skipped rows are ignored; eta needs
// both bnt and edf rows of a cell.
std::vector<SummaryRow> summarize_results(const std::vector<ResultRow>& rows);

inline constexpr const char* kSummaryHeader =
    "metric,algo,kind,ratio,count,infinite,median,ci_low,ci_high";

std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> summary_from_csv(std::istream& in);

// One block per kind (subfigure): columns subfigure,ratio,algo,median,ci_low,
// ci_high, from the per-ratio score rows.
std::string plot_data_csv(const std::vector<SummaryRow>& rows);

}  // namespace marsc
