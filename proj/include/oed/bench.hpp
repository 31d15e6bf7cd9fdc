// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oed/bnb.hpp"
#include "oed/instances.hpp"

namespace oed {

// Benchmark sweep: the cross product of criteria x kinds x sizes x seeds x
// solvers, one branch-and-bound run per combination. n defaults to
// max(1, m/10) per the sizing rule used for generated instances.
struct BenchSpec {
  std::vector<Criterion> criteria;
  std::vector<InstanceKind> kinds;
  std::vector<int> m_list;
  std::vector<unsigned long> seeds;
  std::vector<NodeSolver> solvers;
  double rho = 0.9;
  BnbConfig config{};
};

struct BenchRow {
  InstanceSpec spec;
  Criterion criterion = Criterion::DOptimal;
  NodeSolver solver = NodeSolver::ProjectedNewton;
  std::optional<SolveReport> report;  // empty when the run failed
  std::string error;                  // failure description, else empty
};

// One aggregate per (criterion, kind, m, solver) group, averaged over seeds.
// A run counts as solved when its status is Optimal and its incumbent value
// is within config.abstol of the best value any compared solver found on the
// same instance.
struct BenchAggregate {
  Criterion criterion = Criterion::DOptimal;
  InstanceKind kind = InstanceKind::Independent;
  int m = 0;
  NodeSolver solver = NodeSolver::ProjectedNewton;
  int runs = 0;
  int solved = 0;
  double mean_nodes_per_sec = 0.0;
  double mean_wall_seconds = 0.0;
  double mean_grad_evals_per_node = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchAggregate> aggregates;
};

// Runs the sweep sequentially in deterministic order (criterion, kind, m,
// seed, solver). A run that throws is recorded in its row's error field and
// the sweep continues. Progress lines go to *progress when given.
BenchResult run_bench(const BenchSpec& spec, std::ostream* progress = nullptr);

// Per-run CSV: report_csv_header() plus one row per run; failed runs carry
// status "Error" and empty numeric fields.
void write_bench_csv(const BenchResult& result, std::ostream& out);

// Aggregate CSV:
//   criterion,kind,m,solver,runs,solved,mean_nodes_per_sec,mean_wall_s,
//   mean_grad_evals_per_node
void write_bench_aggregates_csv(const BenchResult& result, std::ostream& out);

}  // namespace oed
