// SPDX-License-Identifier: Apache-2.0
#include "oed/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace oed {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

// JSON numbers cannot carry infinities; encode them as strings so reports
// stay machine-readable.
nlohmann::json json_number(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

}  // namespace

std::string report_to_json(const SolveReport& report, int indent) {
  nlohmann::json j;
  j["status"] = to_string(report.status);
  j["termination"] = to_string(report.termination);
  j["criterion"] = to_string(report.criterion);
  j["node_solver"] = to_string(report.node_solver);

  j["instance"] = {
      {"m", report.m},          {"n", report.n},
      {"budget", report.budget}, {"kind", report.kind},
      {"seed", report.seed},    {"fingerprint", report.fingerprint},
  };

  j["incumbent"] = std::vector<int>(report.incumbent.data(),
                                    report.incumbent.data() +
                                        report.incumbent.size());
  j["f_incumbent"] = json_number(report.f_incumbent);
  j["best_bound"] = json_number(report.best_bound);
  j["abs_gap"] = json_number(report.abs_gap);
  j["rel_gap"] = json_number(report.rel_gap);
  j["rel_gap_guard_fired"] = report.rel_gap_guard_fired;

  j["nodes"] = {
      {"evaluated", report.nodes_evaluated},
      {"pushed", report.nodes_pushed},
      {"popped", report.nodes_popped},
      {"remaining", report.nodes_remaining},
      {"prepruned", report.nodes_prepruned},
      {"domain_prunes", report.domain_prunes},
  };
  j["wall_seconds"] = json_number(report.wall_seconds);
  j["nodes_per_second"] = json_number(report.nodes_per_second);
  j["work"] = {
      {"grad_evals", report.grad_evals},
      {"solver_iters", report.solver_iters},
      {"qp_iters", report.qp_iters},
  };

  j["config"] = {
      {"time_limit", json_number(report.config.time_limit)},
      {"abstol", report.config.abstol},
      {"reltol", report.config.reltol},
      {"node_solver", to_string(report.config.node_solver)},
      {"node_tol", report.config.node_tol},
      {"integrality_tol", report.config.integrality_tol},
      {"node_limit", report.config.node_limit},
      {"threads", report.config.threads},
      {"vem_max_iter", report.config.vem_max_iter},
  };
  return j.dump(indent);
}

std::string report_csv_header() {
  return "criterion,kind,m,n,seed,solver,status,f,bound,abs_gap,rel_gap,"
         "nodes,nodes_per_sec,wall_s,grad_evals";
}

std::string report_csv_row(const SolveReport& report) {
  std::ostringstream out;
  out << to_string(report.criterion) << ',' << report.kind << ',' << report.m
      << ',' << report.n << ',' << report.seed << ','
      << to_string(report.node_solver) << ',' << to_string(report.status)
      << ',' << format_double(report.f_incumbent) << ','
      << format_double(report.best_bound) << ','
      << format_double(report.abs_gap) << ',' << format_double(report.rel_gap)
      << ',' << report.nodes_evaluated << ','
      << format_double(report.nodes_per_second) << ','
      << format_double(report.wall_seconds) << ',' << report.grad_evals;
  return out.str();
}

}  // namespace oed
