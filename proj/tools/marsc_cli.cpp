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

// marsc command line: solve, validate, gen, bench, summarize, plotdata and
// the TOPTW helpers. Every subcommand exits 0 on success and prints a single
// "error: ..." line with a nonzero status otherwise.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "marsc/bench.hpp"
#include "marsc/bnt.hpp"
#include "marsc/edf.hpp"
#include "marsc/exact.hpp"
#include "marsc/feasibility.hpp"
#include "marsc/io.hpp"
#include "marsc/scenarios.hpp"

namespace {

using namespace marsc;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

Instance load_instance(const std::string& path, std::optional<std::uint64_t> seed) {
  Json doc = read_json_file(path);
  if (seed) {
    if (!doc.contains("values")) doc["values"] = {{"kind", "superadditive"}};
    doc["values"]["seed"] = *seed;
  }
  return instance_from_json(doc);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent routing and scheduling through coalition formation"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  std::string algo = "bnt";
  std::string instance_path;
  std::optional<std::uint64_t> seed;
  std::size_t runs = 1;
  std::optional<std::int64_t> budget_ms;
  std::optional<std::size_t> max_steps;
  std::string out_path;
  std::string accrual_name = "literal";
  bool no_proximity = false;
  std::size_t dim_cap = 25;
  solve->add_option("--algo", algo, "bnt, edf or exact")
      ->check(CLI::IsMember({"bnt", "edf", "exact"}));
  solve->add_option("--instance", instance_path, "Instance JSON")->required();
  solve->add_option("--seed", seed, "Override the coalition value seed");
  solve->add_option("--runs", runs, "BNT restarts (refine when > 1)")->check(CLI::PositiveNumber);
  solve->add_option("--budget-ms", budget_ms, "BNT wall-clock budget in milliseconds");
  solve->add_option("--max-steps", max_steps, "BNT step budget");
  solve->add_option("--accrual", accrual_name, "literal or completion")
      ->check(CLI::IsMember({"literal", "completion"}));
  solve->add_flag("--no-proximity", no_proximity, "Disable the proximity filter");
  solve->add_option("--dim-cap", dim_cap, "Exact solver size cap");
  solve->add_option("--out", out_path, "Solution JSON (stdout when omitted)");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check a solution against an instance");
  std::string solution_path;
  validate_cmd->add_option("--instance", instance_path, "Instance JSON")->required();
  validate_cmd->add_option("--solution", solution_path, "Solution JSON")->required();
  validate_cmd->add_option("--seed", seed, "Override the coalition value seed");
  validate_cmd->add_option("--out", out_path, "Violation JSON lines (stdout when omitted)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a scenario instance");
  std::string params_path;
  std::string records_path;
  gen->add_option("--params", params_path, "Scenario parameter JSON")->required();
  gen->add_option("--records", records_path, "Incident record CSV (synthetic when omitted)");
  gen->add_option("--out", out_path, "Instance JSON (stdout when omitted)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a replicated solver comparison");
  std::string config_path;
  std::size_t jobs = 1;
  bench->add_option("--config", config_path, "Experiment config JSON")->required();
  bench->add_option("--out", out_path, "results.csv (config output when omitted)");
  bench->add_option("--jobs", jobs, "Worker threads, 0 for all cores");

  // summarize / plotdata
  std::string in_path;
  auto* summarize_cmd = app.add_subcommand("summarize", "Medians, CIs and eta from results.csv");
  summarize_cmd->add_option("--in", in_path, "results.csv")->required();
  summarize_cmd->add_option("--out", out_path, "summary.csv (stdout when omitted)");
  auto* plot = app.add_subcommand("plotdata", "Per-subfigure plot columns from summary.csv");
  plot->add_option("--in", in_path, "summary.csv")->required();
  plot->add_option("--out", out_path, "Plot CSV (stdout when omitted)");

  // TOPTW helpers
  auto* convert = app.add_subcommand("toptw-convert", "Column-format TOPTW file to JSON");
  std::size_t n_agents = 1;
  convert->add_option("--in", in_path, "Columns: id x y service profit open close")->required();
  convert->add_option("--agents", n_agents, "Number of routes")->check(CLI::PositiveNumber);
  convert->add_option("--out", out_path, "TOPTW JSON (stdout when omitted)");
  auto* reduce = app.add_subcommand("toptw-reduce", "TOPTW JSON to an instance JSON");
  reduce->add_option("--in", in_path, "TOPTW JSON")->required();
  reduce->add_option("--out", out_path, "Instance JSON (stdout when omitted)");
  auto* oracle = app.add_subcommand("toptw-oracle", "Brute-force TOPTW optimum");
  oracle->add_option("--in", in_path, "TOPTW JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const Instance instance = load_instance(instance_path, seed);
      const Accrual accrual = parse_accrual(accrual_name);
      const auto start = std::chrono::steady_clock::now();
      Solution solution;
      if (algo == "bnt") {
        BntOptions options;
        options.accrual = accrual;
        options.proximity_filter = !no_proximity;
        options.max_steps = max_steps;
        if (budget_ms) options.budget = std::chrono::milliseconds(*budget_ms);
        solution = runs > 1 ? refine(instance, runs, options) : solve_bnt(instance, options);
      } else if (algo == "edf") {
        EdfOptions options;
        options.accrual = accrual;
        options.proximity_filter = !no_proximity;
        solution = solve_edf(instance, options);
      } else {
        ExactOptions options;
        options.accrual = accrual;
        options.dim_cap = dim_cap;
        solution = solve_exact(instance, options).solution;
      }
      solution.metadata.wall_millis =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      const double s = score(solution, instance, accrual);
      emit(out_path, solution_to_json(solution, s).dump(2) + "\n");
      std::cerr << "score " << s << " traversals " << solution.metadata.traversals << "\n";
    } else if (validate_cmd->parsed()) {
      const Instance instance = load_instance(instance_path, seed);
      const Solution solution = solution_from_json(read_json_file(solution_path));
      const auto report = validate(solution, instance);
      emit(out_path, to_json_lines(report));
      if (!report.feasible()) {
        std::cerr << "error: solution has " << report.size() << " violation(s)\n";
        return 3;
      }
    } else if (gen->parsed()) {
      const Json doc = read_json_file(params_path);
      const ScenarioParams params = scenario_params_from_json(doc);
      if (records_path.empty() && doc.contains("records")) {
        records_path = doc["records"].get<std::string>();
      }
      Instance instance = [&] {
        if (records_path.empty()) return synth_instance(params);
        const auto parsed = parse_records_file(records_path);
        for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
        return build_instance(parsed.records, params).instance;
      }();
      emit(out_path, instance_to_json(instance).dump(2) + "\n");
    } else if (bench->parsed()) {
      const ExperimentConfig config = experiment_config_from_json(read_json_file(config_path));
      if (out_path.empty()) out_path = config.output;
      if (out_path.empty()) throw std::invalid_argument("no output path (--out or config output)");
      emit(out_path, results_to_csv(run_experiment(config, jobs)));
    } else if (summarize_cmd->parsed()) {
      auto in = open_input(in_path);
      emit(out_path, summary_to_csv(summarize_results(results_from_csv(in))));
    } else if (plot->parsed()) {
      auto in = open_input(in_path);
      emit(out_path, plot_data_csv(summary_from_csv(in)));
    } else if (convert->parsed()) {
      auto in = open_input(in_path);
      emit(out_path, toptw_to_json(parse_toptw_columns(in, n_agents)).dump(2) + "\n");
    } else if (reduce->parsed()) {
      emit(out_path,
           instance_to_json(reduce_toptw(toptw_from_json(read_json_file(in_path)))).dump(2) + "\n");
    } else if (oracle->parsed()) {
      std::cout << toptw_oracle(toptw_from_json(read_json_file(in_path))) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
