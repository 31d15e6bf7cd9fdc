// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: `oedsolve solve` runs branch and bound on one
// instance (from a file or generated from a seed) and writes a JSON or CSV
// report; `oedsolve bench` sweeps criterion x kind x size x seed x solver
// and writes per-run and aggregate CSVs.
//
// Exit codes: 0 solved to tolerance, 2 time or node limit, 3 infeasible,
// 1 usage or input errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oed/bench.hpp"
#include "oed/bnb.hpp"
#include "oed/instances.hpp"
#include "oed/report.hpp"

namespace {

int exit_code_for(oed::SolveStatus status) {
  switch (status) {
    case oed::SolveStatus::Optimal: return 0;
    case oed::SolveStatus::TimeLimit:
    case oed::SolveStatus::NodeLimit: return 2;
    case oed::SolveStatus::Infeasible: return 3;
  }
  return 1;
}

// --generate m,n,kind,seed
oed::InstanceSpec parse_generate(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 4)
    throw oed::ParseError("--generate expects m,n,kind,seed");
  oed::InstanceSpec spec;
  try {
    spec.m = std::stoi(parts[0]);
    spec.n = std::stoi(parts[1]);
    spec.seed = std::stoul(parts[3]);
  } catch (const std::exception&) {
    throw oed::ParseError("--generate expects integer m, n and seed");
  }
  spec.kind = oed::instance_kind_from_string(parts[2]);
  return spec;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw oed::ParseError(path + ": cannot open file for writing");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

int run_solve(const std::string& instance_path, const std::string& generate,
              const std::string& criterion_text, oed::BnbConfig config,
              const std::string& out_path, const std::string& format,
              double rho) {
  oed::Criterion criterion = oed::criterion_from_string(criterion_text);

  oed::DesignProblem problem;
  std::string kind = "file";
  unsigned long seed = 0;
  if (!generate.empty()) {
    oed::InstanceSpec spec = parse_generate(generate);
    spec.rho = rho;
    problem = oed::generate(spec);
    kind = oed::to_string(spec.kind);
    seed = spec.seed;
  } else {
    problem = oed::read_instance(instance_path);
  }

  oed::SolveReport report = oed::solve(problem, criterion, config);
  report.kind = kind;
  report.seed = seed;
  report.fingerprint = oed::fingerprint(problem);

  if (format == "csv") {
    write_text(out_path,
               oed::report_csv_header() + "\n" + oed::report_csv_row(report));
  } else {
    write_text(out_path, oed::report_to_json(report));
  }
  return exit_code_for(report.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact A-/D-optimal experimental design by branch and bound"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  std::string instance_path, generate_text, out_path;
  std::string criterion_text = "D", solver_text = "pn", format = "json";
  double rho = 0.9;
  oed::BnbConfig config;
  auto* inst_opt = solve_cmd->add_option("--instance", instance_path,
                                         "Instance file to solve");
  auto* gen_opt = solve_cmd->add_option(
      "--generate", generate_text, "Generate an instance: m,n,kind,seed");
  inst_opt->excludes(gen_opt);
  solve_cmd->add_option("--criterion", criterion_text, "A or D")
      ->check(CLI::IsMember({"A", "a", "D", "d"}));
  solve_cmd->add_option("--node-solver", solver_text, "pn or vem")
      ->check(CLI::IsMember({"pn", "vem"}));
  solve_cmd->add_option("--time-limit", config.time_limit, "Seconds");
  solve_cmd->add_option("--abstol", config.abstol, "Absolute gap target");
  solve_cmd->add_option("--reltol", config.reltol, "Relative gap target");
  solve_cmd->add_option("--node-tol", config.node_tol,
                        "Relaxation solver tolerance");
  solve_cmd->add_option("--node-limit", config.node_limit,
                        "Max relaxations to evaluate");
  solve_cmd->add_option("--threads", config.threads,
                        "1 = deterministic; >1 evaluates children in parallel");
  solve_cmd->add_option("--rho", rho,
                        "Row correlation decay for generated instances");
  solve_cmd->add_option("--out", out_path, "Report path ('-' = stdout)");
  solve_cmd->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep");
  std::vector<int> m_list{50, 60, 80, 100, 120};
  std::vector<unsigned long> seeds{1, 2, 3, 4, 5};
  std::vector<std::string> criteria_text{"A", "D"};
  std::vector<std::string> kinds_text{"independent", "correlated"};
  std::vector<std::string> solvers_text{"pn", "vem"};
  std::string runs_path = "bench_runs.csv", agg_path = "bench_aggregates.csv";
  oed::BnbConfig bench_config;
  bench_cmd->add_option("--m-list", m_list, "Instance sizes")
      ->delimiter(',');
  bench_cmd->add_option("--seeds", seeds, "Instance seeds")->delimiter(',');
  bench_cmd->add_option("--criteria", criteria_text, "Criteria (A, D)")
      ->delimiter(',');
  bench_cmd->add_option("--kinds", kinds_text, "Instance kinds")
      ->delimiter(',');
  bench_cmd->add_option("--solvers", solvers_text, "Node solvers (pn, vem)")
      ->delimiter(',');
  bench_cmd->add_option("--rho", rho,
                        "Row correlation decay for generated instances");
  bench_cmd->add_option("--time-limit", bench_config.time_limit, "Seconds");
  bench_cmd->add_option("--abstol", bench_config.abstol,
                        "Absolute gap target");
  bench_cmd->add_option("--reltol", bench_config.reltol,
                        "Relative gap target");
  bench_cmd->add_option("--node-tol", bench_config.node_tol,
                        "Relaxation solver tolerance");
  bench_cmd->add_option("--threads", bench_config.threads,
                        "Per-run thread count");
  bench_cmd->add_option("--out", runs_path, "Per-run CSV path");
  bench_cmd->add_option("--agg-out", agg_path, "Aggregate CSV path");
  bool quiet = false;
  bench_cmd->add_flag("--quiet", quiet, "Suppress progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's exit-code family: 0 for --help, 1 for any misuse.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) {
      if (instance_path.empty() && generate_text.empty()) {
        std::cerr << "error: one of --instance or --generate is required\n";
        return 1;
      }
      config.node_solver = oed::node_solver_from_string(solver_text);
      return run_solve(instance_path, generate_text, criterion_text, config,
                       out_path, format, rho);
    }

    oed::BenchSpec spec;
    for (const auto& c : criteria_text)
      spec.criteria.push_back(oed::criterion_from_string(c));
    for (const auto& k : kinds_text)
      spec.kinds.push_back(oed::instance_kind_from_string(k));
    for (const auto& s : solvers_text)
      spec.solvers.push_back(oed::node_solver_from_string(s));
    spec.m_list = m_list;
    spec.seeds = seeds;
    spec.rho = rho;
    spec.config = bench_config;

    oed::BenchResult result = oed::run_bench(spec, quiet ? nullptr : &std::cerr);

    std::ofstream runs_out(runs_path);
    if (!runs_out)
      throw oed::ParseError(runs_path + ": cannot open file for writing");
    oed::write_bench_csv(result, runs_out);
    std::ofstream agg_out(agg_path);
    if (!agg_out)
      throw oed::ParseError(agg_path + ": cannot open file for writing");
    oed::write_bench_aggregates_csv(result, agg_out);

    for (const oed::BenchRow& row : result.rows)
      if (!row.error.empty()) {
        std::cerr << "warning: failed run on m=" << row.spec.m
                  << " seed=" << row.spec.seed << ": " << row.error << '\n';
      }
    return 0;
  } catch (const oed::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
