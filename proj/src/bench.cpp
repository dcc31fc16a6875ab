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

#include "marsc/bench.hpp"

#include <time.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "marsc/bnt.hpp"
#include "marsc/edf.hpp"
#include "marsc/exact.hpp"

namespace marsc {
namespace {

double thread_cpu_millis() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) * 1e3 + static_cast<double>(ts.tv_nsec) / 1e6;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

double parse_number(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double x = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad number '" + text + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad integer '" + text + "'");
  }
  return x;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw std::invalid_argument("unexpected CSV header '" + line + "', want '" + header + "'");
  }
}

std::size_t kind_index(ValueKind kind) {
  return static_cast<std::size_t>(
      std::find(kAllValueKinds.begin(), kAllValueKinds.end(), kind) - kAllValueKinds.begin());
}

struct Cell {
  ValueKind kind;
  std::size_t ratio;
  std::size_t replicate;
};

std::vector<ResultRow> run_cell(const ExperimentConfig& config, const Cell& cell) {
  ScenarioParams params = config.scenario;
  params.n_agents = config.n_agents;
  params.ratio = cell.ratio;
  params.value_kind = cell.kind;
  params.seed = child_seed(config.master_seed, cell.kind, cell.ratio, cell.replicate);
  const Instance instance = synth_instance(params);

  std::vector<ResultRow> rows;
  for (const Algorithm algo : config.algorithms) {
    ResultRow row;
    row.algo = algo;
    row.kind = cell.kind;
    row.ratio = cell.ratio;
    row.replicate = cell.replicate;
    row.seed = params.seed;
    const double start = thread_cpu_millis();
    Solution solution;
    try {
      switch (algo) {
        case Algorithm::kBnt: {
          BntOptions options;
          options.accrual = config.accrual;
          solution = config.bnt_runs > 1 ? refine(instance, config.bnt_runs, options)
                                         : solve_bnt(instance, options);
          break;
        }
        case Algorithm::kEdf: {
          EdfOptions options;
          options.accrual = config.accrual;
          options.key = config.edf_key;
          solution = solve_edf(instance, options);
          break;
        }
        case Algorithm::kExact: {
          ExactOptions options;
          options.accrual = config.accrual;
          options.dim_cap = config.exact_dim_cap;
          solution = solve_exact(instance, options).solution;
          break;
        }
      }
    } catch (const SizeRefusal&) {
      row.skipped = true;
    }
    row.cpu_millis = std::max(0.0, thread_cpu_millis() - start);
    if (!row.skipped) {
      row.score = std::max(0.0, score(solution, instance, config.accrual));
      row.traversals = solution.metadata.traversals;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kBnt:
      return "bnt";
    case Algorithm::kEdf:
      return "edf";
    case Algorithm::kExact:
      return "exact";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "bnt") return Algorithm::kBnt;
  if (text == "edf") return Algorithm::kEdf;
  if (text == "exact") return Algorithm::kExact;
  throw std::invalid_argument("unknown algorithm '" + text + "'");
}

void ExperimentConfig::check() const {
  if (algorithms.empty()) throw std::invalid_argument("algorithms must be nonempty");
  if (ratios.empty()) throw std::invalid_argument("ratios must be nonempty");
  if (kinds.empty()) throw std::invalid_argument("kinds must be nonempty");
  if (replicates == 0) throw std::invalid_argument("replicates must be >= 1");
  if (bnt_runs == 0) throw std::invalid_argument("bnt_runs must be >= 1");
  for (const auto k : ratios) {
    if (k == 0) throw std::invalid_argument("ratios must be >= 1");
  }
  ScenarioParams probe = scenario;
  probe.n_agents = n_agents;
  probe.check();
}

ExperimentConfig experiment_config_from_json(const Json& doc) {
  ExperimentConfig c;
  if (doc.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& a : doc["algorithms"]) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  }
  if (doc.contains("ratios")) c.ratios = doc["ratios"].get<std::vector<std::size_t>>();
  c.n_agents = doc.value("n_agents", c.n_agents);
  if (doc.contains("kinds")) {
    c.kinds.clear();
    for (const auto& k : doc["kinds"]) {
      const auto name = k.get<std::string>();
      if (name == "all") {
        c.kinds.assign(kAllValueKinds.begin(), kAllValueKinds.end());
      } else {
        c.kinds.push_back(parse_value_kind(name));
      }
    }
  }
  c.replicates = doc.value("replicates", c.replicates);
  c.master_seed = doc.value("master_seed", c.master_seed);
  // Single-model form: {"values": {"kind": ..., "seed": ...}}.
  if (doc.contains("values")) {
    const auto& v = doc["values"];
    c.kinds = {parse_value_kind(v.at("kind").get<std::string>())};
    c.master_seed = v.value("seed", c.master_seed);
  }
  if (doc.contains("accrual")) c.accrual = parse_accrual(doc["accrual"].get<std::string>());
  c.output = doc.value("output", c.output);
  c.bnt_runs = doc.value("bnt_runs", c.bnt_runs);
  c.exact_dim_cap = doc.value("exact_dim_cap", c.exact_dim_cap);
  if (doc.contains("edf_key")) c.edf_key = parse_edf_key(doc["edf_key"].get<std::string>());
  if (doc.contains("scenario")) c.scenario = scenario_params_from_json(doc["scenario"]);
  c.check();
  return c;
}

std::uint64_t child_seed(std::uint64_t master, ValueKind kind, std::size_t ratio,
                         std::size_t replicate) {
  std::uint64_t h = hash_combine64(master, kind_index(kind));
  h = hash_combine64(h, ratio);
  h = hash_combine64(h, replicate);
  return mix64(h);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  config.check();
  std::vector<Cell> cells;
  for (const auto kind : config.kinds) {
    for (const auto ratio : config.ratios) {
      for (std::size_t r = 0; r < config.replicates; ++r) cells.push_back({kind, ratio, r});
    }
  }
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(cells.size(), 1));

  std::vector<std::vector<ResultRow>> per_cell(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        per_cell[i] = run_cell(config, cells[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(cells.size());
        return;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<ResultRow> rows;
  for (auto& block : per_cell) rows.insert(rows.end(), block.begin(), block.end());
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::make_tuple(kind_index(a.kind), a.ratio, a.replicate, static_cast<int>(a.algo)) <
           std::make_tuple(kind_index(b.kind), b.ratio, b.replicate, static_cast<int>(b.algo));
  });
  return rows;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const auto& r : rows) {
    out += to_string(r.algo) + "," + std::string(to_string(r.kind)) + "," +
           std::to_string(r.ratio) + "," + std::to_string(r.replicate) + "," +
           std::to_string(r.seed) + "," + format_double(r.score) + "," +
           format_double(r.cpu_millis) + "," + std::to_string(r.traversals) + "," +
           (r.skipped ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<ResultRow> results_from_csv(std::istream& in) {
  expect_header(in, kResultsHeader);
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != 9) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 9 columns");
    }
    ResultRow r;
    r.algo = parse_algorithm(cells[0]);
    r.kind = parse_value_kind(cells[1]);
    r.ratio = parse_u64(cells[2]);
    r.replicate = parse_u64(cells[3]);
    r.seed = parse_u64(cells[4]);
    r.score = parse_number(cells[5]);
    r.cpu_millis = parse_number(cells[6]);
    r.traversals = parse_u64(cells[7]);
    r.skipped = cells[8] == "1";
    rows.push_back(r);
  }
  return rows;
}

SummaryStats summarize(const std::vector<double>& samples, std::uint64_t seed) {
  if (samples.empty()) throw std::domain_error("summarize needs at least one sample");
  auto median_of = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  };
  SummaryStats stats;
  stats.median = median_of(samples);

  KeyedStream stream(seed);
  std::vector<double> medians;
  medians.reserve(kBootstrapResamples);
  std::vector<double> resample(samples.size());
  for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
    for (auto& x : resample) {
      const auto i = static_cast<std::size_t>(stream.next_u64() % samples.size());
      x = samples[i];
    }
    medians.push_back(median_of(resample));
  }
  std::sort(medians.begin(), medians.end());
  auto percentile = [&](double p) {
    const double pos = p * static_cast<double>(medians.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, medians.size() - 1);
    return medians[lo] + (pos - static_cast<double>(lo)) * (medians[hi] - medians[lo]);
  };
  stats.ci_low = percentile(0.025);
  stats.ci_high = percentile(0.975);
  return stats;
}

double eta(double score_bnt, double score_edf) {
  if (score_bnt < 0.0 || score_edf < 0.0) throw std::domain_error("eta needs nonnegative scores");
  if (score_edf == 0.0) {
    return score_bnt == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return score_bnt / score_edf;
}

std::vector<SummaryRow> summarize_results(const std::vector<ResultRow>& rows) {
  using GroupKey = std::tuple<int, std::size_t, std::size_t>;  // algo, kind index, ratio
  std::map<GroupKey, std::pair<std::vector<double>, std::vector<double>>> groups;
  // (kind index, ratio, replicate) -> (bnt, edf)
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>,
           std::pair<std::optional<double>, std::optional<double>>>
      paired;
  for (const auto& r : rows) {
    if (r.skipped) continue;
    auto& g = groups[{static_cast<int>(r.algo), kind_index(r.kind), r.ratio}];
    g.first.push_back(r.score);
    g.second.push_back(r.cpu_millis);
    auto& p = paired[{kind_index(r.kind), r.ratio, r.replicate}];
    if (r.algo == Algorithm::kBnt) p.first = r.score;
    if (r.algo == Algorithm::kEdf) p.second = r.score;
  }

  std::vector<SummaryRow> out;
  for (const auto& [key, samples] : groups) {
    const auto& [algo, kind, ratio] = key;
    const std::string algo_name = to_string(static_cast<Algorithm>(algo));
    const std::string kind_name(to_string(kAllValueKinds[kind]));
    out.push_back({"score", algo_name, kind_name, std::to_string(ratio), samples.first.size(), 0,
                   summarize(samples.first)});
    out.push_back({"cpu_millis", algo_name, kind_name, std::to_string(ratio),
                   samples.second.size(), 0, summarize(samples.second)});
  }

  struct EtaBucket {
    std::vector<double> finite;
    std::size_t infinite = 0;
  };
  std::map<std::pair<std::size_t, std::size_t>, EtaBucket> by_cell;
  std::map<std::size_t, EtaBucket> by_kind;
  EtaBucket overall;
  auto add = [](EtaBucket& b, double e) {
    if (std::isinf(e)) {
      ++b.infinite;
    } else {
      b.finite.push_back(e);
    }
  };
  for (const auto& [key, scores] : paired) {
    if (!scores.first || !scores.second) continue;
    const double e = eta(*scores.first, *scores.second);
    const auto& [kind, ratio, replicate] = key;
    add(by_cell[{kind, ratio}], e);
    add(by_kind[kind], e);
    add(overall, e);
  }
  auto eta_row = [](const std::string& kind, const std::string& ratio, const EtaBucket& b) {
    SummaryRow row{"eta", "bnt/edf", kind, ratio, b.finite.size(), b.infinite, {}};
    if (!b.finite.empty()) row.stats = summarize(b.finite);
    return row;
  };
  for (const auto& [key, bucket] : by_cell) {
    out.push_back(eta_row(std::string(to_string(kAllValueKinds[key.first])),
                          std::to_string(key.second), bucket));
  }
  for (const auto& [kind, bucket] : by_kind) {
    out.push_back(eta_row(std::string(to_string(kAllValueKinds[kind])), "all", bucket));
  }
  if (!paired.empty() && (!overall.finite.empty() || overall.infinite > 0)) {
    out.push_back(eta_row("all", "all", overall));
  }
  return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const auto& r : rows) {
    out += r.metric + "," + r.algo + "," + r.kind + "," + r.ratio + "," + std::to_string(r.count) +
           "," + std::to_string(r.infinite) + "," + format_double(r.stats.median) + "," +
           format_double(r.stats.ci_low) + "," + format_double(r.stats.ci_high) + "\n";
  }
  return out;
}

std::vector<SummaryRow> summary_from_csv(std::istream& in) {
  expect_header(in, kSummaryHeader);
  std::vector<SummaryRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto c = split(line);
    if (c.size() != 9) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 9 columns");
    }
    rows.push_back({c[0], c[1], c[2], c[3], parse_u64(c[4]), parse_u64(c[5]),
                    {parse_number(c[6]), parse_number(c[7]), parse_number(c[8])}});
  }
  return rows;
}

std::string plot_data_csv(const std::vector<SummaryRow>& rows) {
  std::vector<const SummaryRow*> picked;
  for (const auto& r : rows) {
    if (r.metric == "score" && r.ratio != "all") picked.push_back(&r);
  }
  std::stable_sort(picked.begin(), picked.end(), [](const SummaryRow* a, const SummaryRow* b) {
    return std::make_tuple(a->kind, std::stoull(a->ratio), a->algo) <
           std::make_tuple(b->kind, std::stoull(b->ratio), b->algo);
  });
  std::string out = "subfigure,ratio,algo,median,ci_low,ci_high\n";
  for (const auto* r : picked) {
    out += r->kind + "," + r->ratio + "," + r->algo + "," + format_double(r->stats.median) + "," +
           format_double(r->stats.ci_low) + "," + format_double(r->stats.ci_high) + "\n";
  }
  return out;
}

}  // namespace marsc
