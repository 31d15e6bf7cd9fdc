// SPDX-License-Identifier: Apache-2.0
#include "oed/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

#include "oed/report.hpp"

namespace oed {

BenchResult run_bench(const BenchSpec& spec, std::ostream* progress) {
  BenchResult result;

  for (Criterion criterion : spec.criteria) {
    for (InstanceKind kind : spec.kinds) {
      for (int m : spec.m_list) {
        for (unsigned long seed : spec.seeds) {
          InstanceSpec inst;
          inst.m = m;
          inst.n = std::max(1, m / 10);
          inst.kind = kind;
          inst.seed = seed;
          inst.rho = spec.rho;

          DesignProblem problem;
          std::string gen_error;
          try {
            problem = generate(inst);
          } catch (const std::exception& e) {
            gen_error = e.what();
          }

          for (NodeSolver solver : spec.solvers) {
            BenchRow row;
            row.spec = inst;
            row.criterion = criterion;
            row.solver = solver;
            if (!gen_error.empty()) {
              row.error = gen_error;
              result.rows.push_back(std::move(row));
              continue;
            }
            if (progress)
              *progress << "run criterion=" << to_string(criterion)
                        << " kind=" << to_string(kind) << " m=" << m
                        << " seed=" << seed << " solver=" << to_string(solver)
                        << std::endl;
            try {
              BnbConfig config = spec.config;
              config.node_solver = solver;
              SolveReport rep = solve(problem, criterion, config);
              rep.kind = to_string(kind);
              rep.seed = seed;
              rep.fingerprint = fingerprint(problem);
              row.report = std::move(rep);
            } catch (const std::exception& e) {
              row.error = e.what();
            }
            result.rows.push_back(std::move(row));
          }
        }
      }
    }
  }

  // Best value any solver reached per instance, for the solved criterion.
  std::map<std::tuple<int, int, int, unsigned long>, double> best_f;
  for (const BenchRow& row : result.rows) {
    if (!row.report || !std::isfinite(row.report->f_incumbent)) continue;
    auto key = std::make_tuple(static_cast<int>(row.report->criterion),
                               static_cast<int>(row.spec.kind), row.spec.m,
                               row.spec.seed);
    auto it = best_f.find(key);
    if (it == best_f.end() || row.report->f_incumbent < it->second)
      best_f[key] = row.report->f_incumbent;
  }

  std::map<std::tuple<int, int, int, int>, BenchAggregate> groups;
  for (const BenchRow& row : result.rows) {
    if (!row.report) continue;
    const SolveReport& rep = *row.report;
    auto key = std::make_tuple(static_cast<int>(rep.criterion),
                               static_cast<int>(row.spec.kind), row.spec.m,
                               static_cast<int>(row.solver));
    BenchAggregate& agg = groups[key];
    if (agg.runs == 0) {
      agg.criterion = rep.criterion;
      agg.kind = row.spec.kind;
      agg.m = row.spec.m;
      agg.solver = row.solver;
    }
    ++agg.runs;
    agg.mean_nodes_per_sec += rep.nodes_per_second;
    agg.mean_wall_seconds += rep.wall_seconds;
    if (rep.nodes_evaluated > 0)
      agg.mean_grad_evals_per_node +=
          static_cast<double>(rep.grad_evals) /
          static_cast<double>(rep.nodes_evaluated);
    auto inst_key = std::make_tuple(static_cast<int>(rep.criterion),
                                    static_cast<int>(row.spec.kind),
                                    row.spec.m, row.spec.seed);
    auto it = best_f.find(inst_key);
    if (rep.status == SolveStatus::Optimal && it != best_f.end() &&
        rep.f_incumbent <= it->second + spec.config.abstol)
      ++agg.solved;
  }
  for (auto& [key, agg] : groups) {
    if (agg.runs > 0) {
      agg.mean_nodes_per_sec /= agg.runs;
      agg.mean_wall_seconds /= agg.runs;
      agg.mean_grad_evals_per_node /= agg.runs;
    }
    result.aggregates.push_back(agg);
  }
  return result;
}

void write_bench_csv(const BenchResult& result, std::ostream& out) {
  out << report_csv_header() << '\n';
  for (const BenchRow& row : result.rows) {
    if (row.report) {
      out << report_csv_row(*row.report) << '\n';
    } else {
      // Identity columns stay populated so failed runs remain attributable.
      out << to_string(row.criterion) << ',' << to_string(row.spec.kind) << ','
          << row.spec.m << ',' << row.spec.n << ',' << row.spec.seed << ','
          << to_string(row.solver) << ",Error,,,,,,,,\n";
    }
  }
}

void write_bench_aggregates_csv(const BenchResult& result, std::ostream& out) {
  out << "criterion,kind,m,solver,runs,solved,mean_nodes_per_sec,mean_wall_s,"
         "mean_grad_evals_per_node\n";
  for (const BenchAggregate& agg : result.aggregates) {
    out << to_string(agg.criterion) << ',' << to_string(agg.kind) << ','
        << agg.m << ',' << to_string(agg.solver) << ',' << agg.runs << ','
        << agg.solved << ',' << format_double(agg.mean_nodes_per_sec) << ','
        << format_double(agg.mean_wall_seconds) << ','
        << format_double(agg.mean_grad_evals_per_node) << '\n';
  }
}

}  // namespace oed
