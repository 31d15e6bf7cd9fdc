// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "oed/problem.hpp"

namespace oed {

enum class InstanceKind { Independent, Correlated };

const char* to_string(InstanceKind kind);

// Accepts "independent" and "correlated" (case-insensitive); throws
// ParseError otherwise.
InstanceKind instance_kind_from_string(std::string_view text);

// Random instance recipe: m x n design matrix with iid standard normal rows
// (Independent) or rows drawn from N(0, S) with S_ij = rho^|i-j|
// (Correlated); budget N = floor(3n/2); caps uniform on
// [1, max(1, floor(N/3))]. Generation is deterministic in (m, n, kind, seed,
// rho) and regenerates the matrix, bumping an internal attempt counter, until
// it has full column rank.
struct InstanceSpec {
  int m = 0;
  int n = 0;
  InstanceKind kind = InstanceKind::Independent;
  unsigned long seed = 1;
  double rho = 0.9;  // correlation decay, Correlated only

  // Checks 1 <= n <= m and 0 <= rho < 1; throws std::invalid_argument.
  void validate() const;
};

DesignProblem generate(const InstanceSpec& spec);

// Text instance format (whitespace-separated):
//   line 1: m n N
//   line 2: m integer caps
//   lines 3..m+2: one row of A per line, n values each
// Floating-point values are written in shortest round-trip form, so
// write -> read reproduces the problem bit-exactly.
DesignProblem read_instance(std::istream& in, const std::string& name = "<stream>");
DesignProblem read_instance(const std::string& path);
void write_instance(const DesignProblem& problem, std::ostream& out);
void write_instance(const DesignProblem& problem, const std::string& path);
std::string instance_to_string(const DesignProblem& problem);

// FNV-1a fingerprint of the canonical text serialization, as "fnv1a64:<hex>".
std::string fingerprint(const DesignProblem& problem);

}  // namespace oed
